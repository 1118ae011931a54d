#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiersim/errors.hpp"

namespace tiersim {

enum class Tier { frontend, backend };

inline std::string tier_name(Tier t) { return t == Tier::frontend ? "frontend" : "backend"; }

inline Tier parse_tier(const std::string& s) {
    if (s == "frontend") return Tier::frontend;
    if (s == "backend") return Tier::backend;
    throw ParseError("unknown tier name '" + s + "' (expected frontend|backend)");
}

// A processing-element kind, e.g. {"arm-cpu", frontend}.
struct PeKind {
    std::string name;
    Tier tier = Tier::frontend;

    friend bool operator==(const PeKind&, const PeKind&) = default;
};

struct PeInstance {
    int id = 0;
    PeKind kind;

    friend bool operator==(const PeInstance&, const PeInstance&) = default;
};

// The two-tier pool a simulation schedules onto. Instance ids are
// sequential, grouped by kind, frontend kinds first.
struct ResourcePool {
    std::vector<PeInstance> instances;
    std::string label;

    int size() const { return static_cast<int>(instances.size()); }

    int frontend_count() const {
        int n = 0;
        for (const PeInstance& pe : instances)
            if (pe.kind.tier == Tier::frontend) ++n;
        return n;
    }

    friend bool operator==(const ResourcePool&, const ResourcePool&) = default;
};

enum class Contention { none, serialized };

// The edge<->backend channel. Symmetric, one rate for both directions.
struct LinkModel {
    double mbps = 12.0;
    Contention contention = Contention::none;

    friend bool operator==(const LinkModel&, const LinkModel&) = default;
};

// Seconds to move `volume_mb` over the link at its full rate. Contention
// is the engine's concern, not the model's.
inline double transfer_time(double volume_mb, const LinkModel& link) {
    if (volume_mb < 0) throw ValidationError("transfer volume must be non-negative");
    if (!(link.mbps > 0)) throw ValidationError("link rate must be positive");
    return volume_mb / link.mbps;
}

// Data movement is charged only when it crosses the tier boundary.
inline double crossing_volume(Tier producer, Tier consumer, double volume_mb) {
    return producer == consumer ? 0.0 : volume_mb;
}

// Declarative pool description: which kinds exist and how many of each.
struct PoolConfig {
    std::vector<PeKind> kinds;         // declaration order is preserved within a tier
    std::map<std::string, int> counts; // kind name -> instance count
    std::string label;                 // optional; synthesized when empty
};

inline ResourcePool build_pool(const PoolConfig& config) {
    ResourcePool pool;
    std::vector<const PeKind*> ordered;
    for (const PeKind& k : config.kinds)
        if (k.tier == Tier::frontend) ordered.push_back(&k);
    for (const PeKind& k : config.kinds)
        if (k.tier == Tier::backend) ordered.push_back(&k);

    int next_id = 0;
    std::string synth_label;
    for (const PeKind* k : ordered) {
        auto it = config.counts.find(k->name);
        int count = it == config.counts.end() ? 0 : it->second;
        if (count < 0) throw ValidationError("negative count for kind '" + k->name + "'");
        for (int i = 0; i < count; ++i) pool.instances.push_back({next_id++, *k});
        if (count > 0) {
            if (!synth_label.empty()) synth_label += "-";
            synth_label += std::to_string(count) + k->name.substr(0, k->name.find('-'));
        }
    }
    if (pool.instances.empty()) throw ValidationError("pool has zero instances");
    pool.label = config.label.empty() ? synth_label : config.label;
    return pool;
}

// Parses the pool document schema:
//   {"kinds": [{"name", "tier"}], "counts": {name: n},
//    "link": {"mbps", "contention"}, "label"}
// The link block is optional and defaults to 12 Mbps, no contention.
struct PoolDocument {
    ResourcePool pool;
    LinkModel link;
};

inline PoolDocument parse_pool(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed pool document: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("pool document must be a JSON object");
    if (!doc.contains("kinds") || !doc["kinds"].is_array())
        throw ParseError("pool document needs a 'kinds' array");

    PoolConfig config;
    for (const auto& jk : doc["kinds"]) {
        if (!jk.is_object() || !jk.contains("name") || !jk.contains("tier"))
            throw ParseError("kind entries need 'name' and 'tier'");
        config.kinds.push_back(
            {jk["name"].get<std::string>(), parse_tier(jk["tier"].get<std::string>())});
    }
    const nlohmann::json counts = doc.value("counts", nlohmann::json::object());
    for (const auto& [name, count] : counts.items()) {
        if (!count.is_number_integer())
            throw ParseError("count for '" + name + "' must be an integer");
        config.counts[name] = count.get<int>();
    }
    config.label = doc.value("label", std::string());

    PoolDocument out;
    out.pool = build_pool(config);
    if (doc.contains("link")) {
        const auto& jl = doc["link"];
        out.link.mbps = jl.value("mbps", 12.0);
        if (!(out.link.mbps > 0)) throw ParseError("link mbps must be positive");
        std::string c = jl.value("contention", std::string("none"));
        if (c == "none") out.link.contention = Contention::none;
        else if (c == "serialized" || c == "serial") out.link.contention = Contention::serialized;
        else throw ParseError("unknown contention mode '" + c + "'");
    }
    return out;
}

// The experiment's configuration sweep: ARM and Xeon counts vary over
// closed integer intervals, accelerator counts stay fixed.
struct PoolSweepSpec {
    int arm_lo = 1, arm_hi = 3;
    int xeon_lo = 1, xeon_hi = 3;
    int volta = 1;
    int tesla = 1;
    int alveo = 1;
};

namespace detail {

inline const PeKind kArm{"arm-cpu", Tier::frontend};
inline const PeKind kVolta{"volta-gpu", Tier::frontend};
inline const PeKind kXeon{"xeon-cpu", Tier::backend};
inline const PeKind kTesla{"tesla-gpu", Tier::backend};
inline const PeKind kAlveo{"alveo-fpga", Tier::backend};

inline ResourcePool grid_pool(int arm, int volta, int xeon, int tesla, int alveo,
                              const std::string& label) {
    PoolConfig c;
    c.kinds = {kArm, kVolta, kXeon, kTesla, kAlveo};
    c.counts = {{"arm-cpu", arm},
                {"volta-gpu", volta},
                {"xeon-cpu", xeon},
                {"tesla-gpu", tesla},
                {"alveo-fpga", alveo}};
    c.label = label;
    return build_pool(c);
}

} // namespace detail

inline void validate_sweep(const PoolSweepSpec& s) {
    if (s.arm_lo < 1 || s.arm_hi < s.arm_lo) throw ValidationError("invalid arm range");
    if (s.xeon_lo < 1 || s.xeon_hi < s.xeon_lo) throw ValidationError("invalid xeon range");
    if (s.volta < 0 || s.tesla < 0 || s.alveo < 0)
        throw ValidationError("fixed accelerator counts must be >= 0");
}

// The ordered configuration list of the resource-pool sweep: the full
// arm x xeon grid (arm outer, xeon inner), then the edge-only pool, then
// the server-only pool. Labels are unique and stable.
inline std::vector<ResourcePool> enumerate_sweep(const PoolSweepSpec& spec) {
    validate_sweep(spec);
    std::vector<ResourcePool> pools;
    for (int arm = spec.arm_lo; arm <= spec.arm_hi; ++arm)
        for (int xeon = spec.xeon_lo; xeon <= spec.xeon_hi; ++xeon)
            pools.push_back(detail::grid_pool(
                arm, spec.volta, xeon, spec.tesla, spec.alveo,
                "arm" + std::to_string(arm) + "-xeon" + std::to_string(xeon)));

    PoolConfig edge;
    edge.kinds = {detail::kArm, detail::kVolta};
    edge.counts = {{"arm-cpu", spec.arm_hi}, {"volta-gpu", spec.volta}};
    edge.label = "edge-only";
    pools.push_back(build_pool(edge));

    PoolConfig server;
    server.kinds = {detail::kXeon, detail::kTesla, detail::kAlveo};
    server.counts = {{"xeon-cpu", spec.xeon_hi},
                     {"tesla-gpu", spec.tesla},
                     {"alveo-fpga", spec.alveo}};
    server.label = "server-only";
    pools.push_back(build_pool(server));

    return pools;
}

// The configuration Experiment 2 runs on: the sweep's full-resource pool.
inline ResourcePool best_mixed_pool() {
    return detail::grid_pool(3, 1, 3, 1, 1, "arm3-xeon3");
}

} // namespace tiersim
