#pragma once

#include <string>
#include <vector>

#include "tiersim/engine.hpp"
#include "tiersim/errors.hpp"
#include "tiersim/metrics.hpp"
#include "tiersim/platform.hpp"
#include "tiersim/schedulers.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

// Everything one run (or sweep) needs besides the pool and policy.
struct ExperimentSpec {
    WorkloadDag workload;
    int instances = 100;
    double inter_arrival_delay_s = 0.0;
    LinkModel link;     // 12 Mbps, no contention
    SimOptions options; // per-datum locations, result-return on
};

struct ResultTable {
    std::vector<RunSummary> rows;

    // Rows are unique by (pool, scheduler).
    void add(RunSummary row) {
        for (const RunSummary& r : rows)
            if (r.pool_label == row.pool_label && r.scheduler == row.scheduler)
                throw ValidationError("duplicate result row: " + row.pool_label + "/" +
                                      row.scheduler);
        rows.push_back(std::move(row));
    }
};

inline RunSummary run_one(const ExperimentSpec& spec, const ResourcePool& pool,
                          SchedulerKind scheduler) {
    Timeline t = run_simulation(spec.workload, {spec.instances, spec.inter_arrival_delay_s},
                                pool, scheduler, spec.link, spec.options);
    return summarize(t, pool);
}

// Experiment 1: one row per pool configuration, in enumeration order
// (3x3 arm/xeon grid, then edge-only, then server-only).
inline ResultTable sweep_pools(const ExperimentSpec& spec, const PoolSweepSpec& sweep = {},
                               SchedulerKind scheduler = SchedulerKind::eft) {
    ResultTable table;
    for (const ResourcePool& pool : enumerate_sweep(sweep))
        table.add(run_one(spec, pool, scheduler));
    return table;
}

// The minimum-makespan row; ties go to the earlier row.
inline const RunSummary& best_row(const ResultTable& table) {
    if (table.rows.empty()) throw ValidationError("empty result table");
    const RunSummary* best = &table.rows.front();
    for (const RunSummary& r : table.rows)
        if (r.makespan_s < best->makespan_s) best = &r;
    return *best;
}

// Experiment 2: EFT, ETF and RR on one fixed pool, in that order.
inline ResultTable sweep_schedulers(const ExperimentSpec& spec, const ResourcePool& pool) {
    ResultTable table;
    for (SchedulerKind k : {SchedulerKind::eft, SchedulerKind::etf, SchedulerKind::rr})
        table.add(run_one(spec, pool, k));
    return table;
}

// How much better a policy did than round-robin, in relative percent.
struct SchedulerDelta {
    std::string scheduler;
    double makespan_reduction_pct = 0.0;   // (rr - x) / rr * 100
    double utilization_gain_pct = 0.0;     // (x - rr) / rr * 100
};

inline std::vector<SchedulerDelta> deltas_vs_rr(const ResultTable& table) {
    const RunSummary* rr = nullptr;
    for (const RunSummary& r : table.rows)
        if (r.scheduler == "rr") rr = &r;
    if (!rr) throw ValidationError("no rr row to compare against");
    std::vector<SchedulerDelta> out;
    for (const RunSummary& r : table.rows) {
        if (&r == rr) continue;
        out.push_back({r.scheduler,
                       (rr->makespan_s - r.makespan_s) / rr->makespan_s * 100.0,
                       (r.mean_utilization - rr->mean_utilization) / rr->mean_utilization * 100.0});
    }
    return out;
}

} // namespace tiersim
