#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiersim/errors.hpp"

namespace tiersim {

// One pipeline step. exec_s maps a processing-element kind name to this
// task's execution time in seconds on that kind.
struct TaskSpec {
    int id = 0;
    std::string name;
    std::map<std::string, double> exec_s;
    double out_mb = 0.0; // data volume this task produces, megabits

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

// Predecessor-successor dependency carrying `mb` megabits from src to dst.
struct DagEdge {
    int src = 0;
    int dst = 0;
    double mb = 0.0;

    friend bool operator==(const DagEdge&, const DagEdge&) = default;
};

// A pipeline DAG plus the raw sensor payload (megabits) delivered to each
// entry task. Raw input always originates on the frontend tier.
struct WorkloadDag {
    std::vector<TaskSpec> tasks;
    std::vector<DagEdge> edges;
    double raw_input_mb = 0.0;

    friend bool operator==(const WorkloadDag&, const WorkloadDag&) = default;
};

// How many instances of a dag get submitted and how far apart.
struct JobSubmission {
    int instances = 1;
    double inter_arrival_delay_s = 0.0; // 0 = all at once
};

struct ValidationIssue {
    std::string message;

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

namespace detail {

inline std::string fmt_id(int id) { return std::to_string(id); }

} // namespace detail

// Checks every WorkloadDag invariant. Returns one issue per violation;
// an empty report means the dag is valid. Violations are data, not failures.
inline std::vector<ValidationIssue> validate_dag(const WorkloadDag& dag) {
    std::vector<ValidationIssue> issues;
    auto flag = [&issues](std::string msg) { issues.push_back({std::move(msg)}); };

    if (dag.tasks.empty()) flag("workload has no tasks");
    if (dag.raw_input_mb < 0) flag("raw_input_mb is negative");

    std::set<int> ids;
    for (const TaskSpec& t : dag.tasks) {
        const std::string label = "task " + detail::fmt_id(t.id);
        if (t.id < 0) flag(label + ": id is negative");
        if (!ids.insert(t.id).second) flag(label + ": duplicate id");
        if (t.exec_s.empty()) flag(label + ": exec profile is empty");
        for (const auto& [kind, secs] : t.exec_s) {
            if (kind.empty()) flag(label + ": exec profile has an empty kind name");
            if (!(secs > 0)) flag(label + ": non-positive execution time for kind '" + kind + "'");
        }
        if (t.out_mb < 0) flag(label + ": negative output volume");
    }

    bool endpoints_ok = true;
    for (const DagEdge& e : dag.edges) {
        const std::string label =
            "edge " + detail::fmt_id(e.src) + "->" + detail::fmt_id(e.dst);
        if (e.src == e.dst) {
            flag(label + ": self loop");
            endpoints_ok = false;
        }
        if (!ids.count(e.src)) {
            flag(label + ": dangling src endpoint");
            endpoints_ok = false;
        }
        if (!ids.count(e.dst)) {
            flag(label + ": dangling dst endpoint");
            endpoints_ok = false;
        }
        if (e.mb < 0) flag(label + ": negative volume");
    }

    if (!dag.tasks.empty() && endpoints_ok) {
        // Kahn's algorithm; leftover in-degree means a cycle.
        std::map<int, int> indeg;
        for (const TaskSpec& t : dag.tasks) indeg[t.id] = 0;
        std::multimap<int, int> succ;
        for (const DagEdge& e : dag.edges) {
            ++indeg[e.dst];
            succ.insert({e.src, e.dst});
        }
        std::vector<int> queue;
        for (const auto& [id, d] : indeg)
            if (d == 0) queue.push_back(id);
        std::size_t popped = 0;
        while (popped < queue.size()) {
            int id = queue[popped++];
            auto [lo, hi] = succ.equal_range(id);
            for (auto it = lo; it != hi; ++it)
                if (--indeg[it->second] == 0) queue.push_back(it->second);
        }
        if (popped != dag.tasks.size()) flag("dag contains a cycle");

        std::set<int> has_pred, has_succ;
        for (const DagEdge& e : dag.edges) {
            has_pred.insert(e.dst);
            has_succ.insert(e.src);
        }
        if (has_pred.size() == dag.tasks.size()) flag("dag has no entry task");
        if (has_succ.size() == dag.tasks.size()) flag("dag has no exit task");
    }

    return issues;
}

// Tasks not yet completed whose predecessors have all completed.
// `completed` must only contain known task ids.
inline std::set<int> ready_tasks(const WorkloadDag& dag, const std::set<int>& completed) {
    std::set<int> ids;
    for (const TaskSpec& t : dag.tasks) ids.insert(t.id);
    for (int id : completed)
        if (!ids.count(id))
            throw ValidationError("ready_tasks: unknown task id " + detail::fmt_id(id) +
                                  " in completed set");

    std::set<int> out;
    for (const TaskSpec& t : dag.tasks) {
        if (completed.count(t.id)) continue;
        bool ready = true;
        for (const DagEdge& e : dag.edges)
            if (e.dst == t.id && !completed.count(e.src)) {
                ready = false;
                break;
            }
        if (ready) out.insert(t.id);
    }
    return out;
}

// Index-based adjacency view over a validated dag. Task index order follows
// ascending task id, which fixes every iteration order downstream.
struct DagView {
    struct InEdge {
        int pred; // task index
        double mb;
    };

    std::vector<int> task_ids;                       // index -> id
    std::vector<std::string> names;                  // index -> name
    std::vector<std::map<std::string, double>> exec; // index -> kind -> seconds
    std::vector<double> out_mb;
    std::vector<std::vector<InEdge>> inputs;
    std::vector<std::vector<int>> successors;
    std::vector<int> entries;
    std::vector<int> exits;
    double raw_input_mb = 0.0;

    explicit DagView(const WorkloadDag& dag) {
        if (auto issues = validate_dag(dag); !issues.empty())
            throw ValidationError("invalid workload: " + issues.front().message);

        std::map<int, int> idx_of;
        for (const TaskSpec& t : dag.tasks) idx_of[t.id] = 0;
        int next = 0;
        for (auto& [id, idx] : idx_of) idx = next++;

        const int n = static_cast<int>(dag.tasks.size());
        task_ids.resize(n);
        names.resize(n);
        exec.resize(n);
        out_mb.resize(n);
        inputs.resize(n);
        successors.resize(n);
        for (const TaskSpec& t : dag.tasks) {
            int i = idx_of.at(t.id);
            task_ids[i] = t.id;
            names[i] = t.name;
            exec[i] = t.exec_s;
            out_mb[i] = t.out_mb;
        }
        for (const DagEdge& e : dag.edges) {
            inputs[idx_of.at(e.dst)].push_back({idx_of.at(e.src), e.mb});
            successors[idx_of.at(e.src)].push_back(idx_of.at(e.dst));
        }
        for (int i = 0; i < n; ++i) {
            std::sort(inputs[i].begin(), inputs[i].end(),
                      [](const InEdge& a, const InEdge& b) { return a.pred < b.pred; });
            std::sort(successors[i].begin(), successors[i].end());
            if (inputs[i].empty()) entries.push_back(i);
            if (successors[i].empty()) exits.push_back(i);
        }
        raw_input_mb = dag.raw_input_mb;
    }

    int size() const { return static_cast<int>(task_ids.size()); }

    bool is_entry(int idx) const { return inputs[idx].empty(); }
    bool is_exit(int idx) const { return successors[idx].empty(); }

    double input_mb_total(int idx) const {
        double v = 0;
        for (const InEdge& e : inputs[idx]) v += e.mb;
        return v;
    }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + " must be a number");
    return j.get<double>();
}

inline int require_id(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ParseError(where + " must be a non-negative integer");
    return j.get<int>();
}

} // namespace detail

// Parses the workload document schema:
//   {"tasks": [{"id", "name", "exec_s": {kind: seconds}, "out_mb"}],
//    "edges": [{"src", "dst", "mb"}], "raw_input_mb"}
// Throws ParseError on malformed documents and on any invariant violation
// (duplicate ids, dangling endpoints, non-positive times, cycles).
inline WorkloadDag parse_workload(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed workload document: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("workload document must be a JSON object");
    if (!doc.contains("tasks") || !doc["tasks"].is_array())
        throw ParseError("workload document needs a 'tasks' array");

    WorkloadDag dag;
    for (const auto& jt : doc["tasks"]) {
        if (!jt.is_object()) throw ParseError("task entries must be objects");
        TaskSpec t;
        t.id = detail::require_id(jt.value("id", nlohmann::json()), "task id");
        t.name = jt.value("name", std::string());
        if (!jt.contains("exec_s") || !jt["exec_s"].is_object())
            throw ParseError("task " + detail::fmt_id(t.id) + " needs an 'exec_s' object");
        for (const auto& [kind, secs] : jt["exec_s"].items())
            t.exec_s[kind] =
                detail::require_number(secs, "task " + detail::fmt_id(t.id) + " exec_s." + kind);
        t.out_mb = detail::require_number(jt.value("out_mb", nlohmann::json(0.0)),
                                          "task " + detail::fmt_id(t.id) + " out_mb");
        dag.tasks.push_back(std::move(t));
    }
    for (const auto& je : doc.value("edges", nlohmann::json::array())) {
        if (!je.is_object()) throw ParseError("edge entries must be objects");
        DagEdge e;
        e.src = detail::require_id(je.value("src", nlohmann::json()), "edge src");
        e.dst = detail::require_id(je.value("dst", nlohmann::json()), "edge dst");
        e.mb = detail::require_number(je.value("mb", nlohmann::json(0.0)), "edge mb");
        dag.edges.push_back(e);
    }
    dag.raw_input_mb =
        detail::require_number(doc.value("raw_input_mb", nlohmann::json(0.0)), "raw_input_mb");

    if (auto issues = validate_dag(dag); !issues.empty()) {
        std::string msg = "invalid workload: " + issues.front().message;
        if (issues.size() > 1)
            msg += " (+" + std::to_string(issues.size() - 1) + " more violations)";
        throw ParseError(msg);
    }
    return dag;
}

// Emits the same schema parse_workload reads; parse(serialize(dag)) == dag.
inline std::string serialize_workload(const WorkloadDag& dag) {
    nlohmann::json doc;
    doc["tasks"] = nlohmann::json::array();
    for (const TaskSpec& t : dag.tasks) {
        nlohmann::json jt;
        jt["id"] = t.id;
        jt["name"] = t.name;
        jt["exec_s"] = nlohmann::json::object();
        for (const auto& [kind, secs] : t.exec_s) jt["exec_s"][kind] = secs;
        jt["out_mb"] = t.out_mb;
        doc["tasks"].push_back(std::move(jt));
    }
    doc["edges"] = nlohmann::json::array();
    for (const DagEdge& e : dag.edges)
        doc["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"mb", e.mb}});
    doc["raw_input_mb"] = dag.raw_input_mb;
    return doc.dump(2) + "\n";
}

// The reference 16-node data-science pipeline shipped with the repository:
// four layers (ingest -> transform -> model -> evaluate), fan-out 2-3,
// synthetic execution profiles where backend kinds run roughly 4-8x faster
// than their frontend counterparts on compute-heavy steps.
inline constexpr std::string_view kDsWorkloadJson = R"json({
  "tasks": [
    {"id": 0,  "name": "SQL Transform",
     "exec_s": {"arm-cpu": 7.0,  "volta-gpu": 9.3, "xeon-cpu": 11.2, "tesla-gpu": 7.7, "alveo-fpga": 8.5},
     "out_mb": 30.0},
    {"id": 1,  "name": "join data",
     "exec_s": {"arm-cpu": 6.0,  "volta-gpu": 8.0, "xeon-cpu": 9.6, "tesla-gpu": 6.6, "alveo-fpga": 7.3},
     "out_mb": 24.0},
    {"id": 2,  "name": "clean missing data",
     "exec_s": {"arm-cpu": 9.0,  "volta-gpu": 7.3, "xeon-cpu": 14.4, "tesla-gpu": 9.9, "alveo-fpga": 10.9},
     "out_mb": 16.0},
    {"id": 3,  "name": "data summarization",
     "exec_s": {"arm-cpu": 8.0,  "volta-gpu": 6.4, "xeon-cpu": 12.8, "tesla-gpu": 8.8, "alveo-fpga": 9.7},
     "out_mb": 10.0},
    {"id": 4,  "name": "column selection",
     "exec_s": {"arm-cpu": 5.0,  "volta-gpu": 5.8, "xeon-cpu": 8.0, "tesla-gpu": 5.5, "alveo-fpga": 6.1},
     "out_mb": 12.0},
    {"id": 5,  "name": "normalize data",
     "exec_s": {"arm-cpu": 6.5,  "volta-gpu": 4.6, "xeon-cpu": 10.4, "tesla-gpu": 7.2, "alveo-fpga": 7.9},
     "out_mb": 12.0},
    {"id": 6,  "name": "split data",
     "exec_s": {"arm-cpu": 4.5,  "volta-gpu": 5.2, "xeon-cpu": 7.2, "tesla-gpu": 5.0, "alveo-fpga": 5.4},
     "out_mb": 14.0},
    {"id": 7,  "name": "filter-based feature selection",
     "exec_s": {"arm-cpu": 16.0, "volta-gpu": 8.7, "xeon-cpu": 2.5, "tesla-gpu": 1.9, "alveo-fpga": 1.4},
     "out_mb": 8.0},
    {"id": 8,  "name": "k-means clustering",
     "exec_s": {"arm-cpu": 24.0, "volta-gpu": 10.9, "xeon-cpu": 4.0, "tesla-gpu": 1.7, "alveo-fpga": 2.4},
     "out_mb": 6.0},
    {"id": 9,  "name": "sweep clustering",
     "exec_s": {"arm-cpu": 28.0, "volta-gpu": 13.1, "xeon-cpu": 4.2, "tesla-gpu": 2.1, "alveo-fpga": 2.8},
     "out_mb": 6.0},
    {"id": 10, "name": "train clustering model",
     "exec_s": {"arm-cpu": 22.0, "volta-gpu": 10.2, "xeon-cpu": 3.2, "tesla-gpu": 1.6, "alveo-fpga": 2.2},
     "out_mb": 8.0},
    {"id": 11, "name": "time-series anomaly detection",
     "exec_s": {"arm-cpu": 18.0, "volta-gpu": 11.6, "xeon-cpu": 3.0, "tesla-gpu": 2.4, "alveo-fpga": 1.2},
     "out_mb": 6.0},
    {"id": 12, "name": "principal component analysis",
     "exec_s": {"arm-cpu": 14.0, "volta-gpu": 8.0, "xeon-cpu": 2.2, "tesla-gpu": 1.5, "alveo-fpga": 1.8},
     "out_mb": 6.0},
    {"id": 13, "name": "score model",
     "exec_s": {"arm-cpu": 5.0,  "volta-gpu": 6.1, "xeon-cpu": 8.0, "tesla-gpu": 5.5, "alveo-fpga": 6.1},
     "out_mb": 4.0},
    {"id": 14, "name": "evaluate model",
     "exec_s": {"arm-cpu": 4.0,  "volta-gpu": 4.9, "xeon-cpu": 6.4, "tesla-gpu": 4.4, "alveo-fpga": 4.8},
     "out_mb": 3.0},
    {"id": 15, "name": "export results",
     "exec_s": {"arm-cpu": 3.5,  "volta-gpu": 4.4, "xeon-cpu": 5.6, "tesla-gpu": 3.9, "alveo-fpga": 4.2},
     "out_mb": 2.0}
  ],
  "edges": [
    {"src": 0,  "dst": 2,  "mb": 20.0},
    {"src": 0,  "dst": 3,  "mb": 18.0},
    {"src": 1,  "dst": 4,  "mb": 16.0},
    {"src": 1,  "dst": 5,  "mb": 16.0},
    {"src": 1,  "dst": 6,  "mb": 18.0},
    {"src": 2,  "dst": 7,  "mb": 10.0},
    {"src": 2,  "dst": 12, "mb": 8.0},
    {"src": 3,  "dst": 11, "mb": 8.0},
    {"src": 3,  "dst": 12, "mb": 8.0},
    {"src": 4,  "dst": 7,  "mb": 9.0},
    {"src": 4,  "dst": 8,  "mb": 10.0},
    {"src": 5,  "dst": 8,  "mb": 9.0},
    {"src": 5,  "dst": 9,  "mb": 8.0},
    {"src": 6,  "dst": 10, "mb": 10.0},
    {"src": 6,  "dst": 11, "mb": 8.0},
    {"src": 7,  "dst": 13, "mb": 5.0},
    {"src": 7,  "dst": 14, "mb": 4.0},
    {"src": 8,  "dst": 13, "mb": 4.0},
    {"src": 8,  "dst": 15, "mb": 4.0},
    {"src": 9,  "dst": 14, "mb": 4.0},
    {"src": 9,  "dst": 15, "mb": 4.0},
    {"src": 10, "dst": 13, "mb": 5.0},
    {"src": 10, "dst": 14, "mb": 4.0},
    {"src": 11, "dst": 14, "mb": 3.0},
    {"src": 11, "dst": 15, "mb": 3.0},
    {"src": 12, "dst": 13, "mb": 3.0},
    {"src": 12, "dst": 15, "mb": 3.0}
  ],
  "raw_input_mb": 400.0
})json";

// The shipped 16-node DS workload. Pure constant: every call yields an
// identical structure.
inline WorkloadDag canonical_ds_workload() {
    static const WorkloadDag dag = parse_workload(std::string(kDsWorkloadJson));
    return dag;
}

} // namespace tiersim
