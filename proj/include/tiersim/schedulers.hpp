#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "tiersim/errors.hpp"
#include "tiersim/platform.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

enum class SchedulerKind { eft, etf, rr };

inline std::string scheduler_name(SchedulerKind k) {
    switch (k) {
        case SchedulerKind::eft: return "eft";
        case SchedulerKind::etf: return "etf";
        case SchedulerKind::rr: return "rr";
    }
    return "?";
}

// CLI token -> kind, case-insensitive.
inline std::optional<SchedulerKind> parse_scheduler(std::string token) {
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (token == "eft") return SchedulerKind::eft;
    if (token == "etf") return SchedulerKind::etf;
    if (token == "rr") return SchedulerKind::rr;
    return std::nullopt;
}

// Whether transfers follow data placement or the static backend charge.
enum class CommMode { location, fixed };

inline std::optional<CommMode> parse_comm_mode(const std::string& token) {
    if (token == "location") return CommMode::location;
    if (token == "static") return CommMode::fixed;
    return std::nullopt;
}

struct PeState {
    int pe = 0;
    double available_at = 0.0; // earliest time a new task may start on this PE
};

// Tier on which each finished task's output resides, per job instance.
// An entry exists only once the task has finished; outputs stay where they
// were produced (consumers read a copy, the canonical location is fixed).
class DataLocations {
public:
    DataLocations(int jobs, int tasks) : tasks_(tasks), tier_(static_cast<std::size_t>(jobs) * tasks, kUnset) {}

    void set(int job, int task_idx, Tier t) {
        tier_[index(job, task_idx)] = t == Tier::frontend ? 0 : 1;
    }

    bool known(int job, int task_idx) const { return tier_[index(job, task_idx)] != kUnset; }

    Tier get(int job, int task_idx) const {
        signed char v = tier_[index(job, task_idx)];
        if (v == kUnset)
            throw ValidationError("data location queried before task finished");
        return v == 0 ? Tier::frontend : Tier::backend;
    }

private:
    static constexpr signed char kUnset = -1;

    std::size_t index(int job, int task_idx) const {
        return static_cast<std::size_t>(job) * tasks_ + task_idx;
    }

    int tasks_;
    std::vector<signed char> tier_;
};

// Pool-dependent lookup tables: per-PE tier and per-(task, PE) execution
// time resolved from the kind profiles. Built once per simulation.
struct PoolView {
    const ResourcePool* pool = nullptr;
    std::vector<Tier> tier_by_pe;
    std::vector<std::vector<double>> exec_by_pe; // [task index][pe index]

    PoolView(const ResourcePool& p, const DagView& dag) : pool(&p) {
        if (p.instances.empty()) throw ValidationError("empty pool");
        tier_by_pe.reserve(p.instances.size());
        for (const PeInstance& pe : p.instances) tier_by_pe.push_back(pe.kind.tier);
        exec_by_pe.resize(dag.size());
        for (int t = 0; t < dag.size(); ++t) {
            exec_by_pe[t].reserve(p.instances.size());
            for (const PeInstance& pe : p.instances) {
                auto it = dag.exec[t].find(pe.kind.name);
                if (it == dag.exec[t].end())
                    throw ValidationError("task " + std::to_string(dag.task_ids[t]) +
                                          ": exec profile missing pool kind '" + pe.kind.name +
                                          "'");
                exec_by_pe[t].push_back(it->second);
            }
        }
    }

    int size() const { return static_cast<int>(tier_by_pe.size()); }
};

struct ReadyEntry {
    double ready_time = 0.0;
    int job = 0;
    int task_idx = 0;

    friend bool operator<(const ReadyEntry& a, const ReadyEntry& b) {
        if (a.ready_time != b.ready_time) return a.ready_time < b.ready_time;
        if (a.job != b.job) return a.job < b.job;
        return a.task_idx < b.task_idx;
    }
    friend bool operator==(const ReadyEntry&, const ReadyEntry&) = default;
};

// Snapshot a policy decides from. The engine owns all referenced state;
// a context is only valid for the duration of one select call.
struct SchedulerContext {
    double clock = 0.0;
    const std::vector<ReadyEntry>* ready = nullptr; // ordered, nonempty
    const std::vector<PeState>* pe_states = nullptr;
    const DataLocations* locations = nullptr;
    LinkModel link;
    const DagView* dag = nullptr;
    const PoolView* pool = nullptr;
    CommMode comm_mode = CommMode::location;
    int rr_cursor = 0;

    double exec_time(int task_idx, int pe) const { return pool->exec_by_pe[task_idx][pe]; }

    // Megabits that must cross the link before task_idx may start on pe.
    double input_volume_mb(int job, int task_idx, int pe) const {
        Tier dst = pool->tier_by_pe[pe];
        if (comm_mode == CommMode::fixed) {
            // Static charge: backend placements pay full input + output.
            if (dst != Tier::backend) return 0.0;
            double v = dag->input_mb_total(task_idx) + dag->out_mb[task_idx];
            if (dag->is_entry(task_idx)) v += dag->raw_input_mb;
            return v;
        }
        double v = 0.0;
        for (const DagView::InEdge& e : dag->inputs[task_idx])
            v += crossing_volume(locations->get(job, e.pred), dst, e.mb);
        if (dag->is_entry(task_idx))
            v += crossing_volume(Tier::frontend, dst, dag->raw_input_mb);
        return v;
    }
};

struct SchedulingDecision {
    int job = 0;
    int task_idx = 0;
    int pe = 0;
    double predicted_start = 0.0;  // execution start, after any input transfer
    double predicted_finish = 0.0; // predicted_start + exec time on the PE's kind

    friend bool operator==(const SchedulingDecision&, const SchedulingDecision&) = default;
};

namespace detail {

struct PredictedTimes {
    double transfer_start;
    double exec_start;
    double finish;
    double volume_mb;
};

// Shared timing formula: the engine realizes exactly what policies predict
// (under uncontended links), so both sides must use this one computation.
inline PredictedTimes predict_times(const SchedulerContext& ctx, int job, int task_idx, int pe) {
    double transfer_start = std::max(ctx.clock, (*ctx.pe_states)[pe].available_at);
    double volume = ctx.input_volume_mb(job, task_idx, pe);
    double exec_start = transfer_start + transfer_time(volume, ctx.link);
    double finish = exec_start + ctx.exec_time(task_idx, pe);
    return {transfer_start, exec_start, finish, volume};
}

} // namespace detail

// Earliest Finish Time: place the head ready task on the PE that minimizes
// its predicted finish (queue wait + boundary transfer + execution).
// Ties go to the lower PE id.
inline SchedulingDecision select_eft(const SchedulerContext& ctx) {
    if (ctx.ready->empty()) throw ValidationError("select_eft: empty ready set");
    const ReadyEntry head = ctx.ready->front();
    SchedulingDecision best;
    double best_finish = 0.0;
    bool first = true;
    for (int pe = 0; pe < ctx.pool->size(); ++pe) {
        auto t = detail::predict_times(ctx, head.job, head.task_idx, pe);
        if (first || t.finish < best_finish) {
            best = {head.job, head.task_idx, pe, t.exec_start, t.finish};
            best_finish = t.finish;
            first = false;
        }
    }
    return best;
}

// Earliest Task First: over all (ready task, PE) pairs, pick the pair that
// can begin executing soonest. Ties break on smaller predicted finish, then
// job id, then task id, then PE id.
inline SchedulingDecision select_etf(const SchedulerContext& ctx) {
    if (ctx.ready->empty()) throw ValidationError("select_etf: empty ready set");
    SchedulingDecision best;
    bool first = true;
    auto better = [](double s1, double f1, const ReadyEntry& r1, int pe1,
                     double s2, double f2, const ReadyEntry& r2, int pe2) {
        if (s1 != s2) return s1 < s2;
        if (f1 != f2) return f1 < f2;
        if (r1.job != r2.job) return r1.job < r2.job;
        if (r1.task_idx != r2.task_idx) return r1.task_idx < r2.task_idx;
        return pe1 < pe2;
    };
    double best_start = 0.0, best_finish = 0.0;
    ReadyEntry best_entry;
    for (const ReadyEntry& r : *ctx.ready) {
        for (int pe = 0; pe < ctx.pool->size(); ++pe) {
            auto t = detail::predict_times(ctx, r.job, r.task_idx, pe);
            if (first || better(t.exec_start, t.finish, r, pe, best_start, best_finish,
                                best_entry, best.pe)) {
                best = {r.job, r.task_idx, pe, t.exec_start, t.finish};
                best_start = t.exec_start;
                best_finish = t.finish;
                best_entry = r;
                first = false;
            }
        }
    }
    return best;
}

// Round Robin: head ready task goes to the PE at the cursor, cursor wraps
// around the pool. Timing fields are filled in but never influence the pick.
inline SchedulingDecision select_rr(const SchedulerContext& ctx) {
    if (ctx.ready->empty()) throw ValidationError("select_rr: empty ready set");
    if (ctx.rr_cursor < 0 || ctx.rr_cursor >= ctx.pool->size())
        throw ValidationError("select_rr: cursor out of range");
    const ReadyEntry head = ctx.ready->front();
    auto t = detail::predict_times(ctx, head.job, head.task_idx, ctx.rr_cursor);
    return {head.job, head.task_idx, ctx.rr_cursor, t.exec_start, t.finish};
}

inline SchedulingDecision select_decision(SchedulerKind kind, const SchedulerContext& ctx) {
    switch (kind) {
        case SchedulerKind::eft: return select_eft(ctx);
        case SchedulerKind::etf: return select_etf(ctx);
        case SchedulerKind::rr: return select_rr(ctx);
    }
    throw ValidationError("unknown scheduler kind");
}

} // namespace tiersim
