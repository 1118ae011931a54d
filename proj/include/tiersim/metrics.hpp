#pragma once

#include <string>
#include <vector>

#include "tiersim/engine.hpp"
#include "tiersim/platform.hpp"

namespace tiersim {

struct UtilizationReport {
    std::vector<double> busy_s;  // total execution seconds, one entry per PE
    std::vector<double> per_pe;  // busy fraction in [0,1]; idle PEs stay 0
    double mean = 0.0;           // arithmetic mean over all PEs, idle included
};

// Busy time counts execution only; input transfers hold the PE but are not
// "useful" work. The denominator is the whole-batch makespan for every PE.
inline UtilizationReport utilization(const Timeline& timeline) {
    double span = makespan(timeline);
    if (!(span > 0)) throw ValidationError("utilization: zero makespan");
    UtilizationReport report;
    report.busy_s.assign(timeline.pe_kind_names.size(), 0.0);
    for (const ScheduleRecord& r : timeline.records)
        report.busy_s[r.pe] += r.finish - r.exec_start;
    report.per_pe.reserve(report.busy_s.size());
    double total = 0.0;
    for (double busy : report.busy_s) {
        double fraction = busy / span;
        report.per_pe.push_back(fraction);
        total += fraction;
    }
    report.mean = total / static_cast<double>(report.per_pe.size());
    return report;
}

inline UtilizationReport utilization(const Timeline& timeline, const ResourcePool& pool) {
    if (pool.size() != static_cast<int>(timeline.pe_kind_names.size()))
        throw ValidationError("pool does not match the timeline it is scored against");
    return utilization(timeline);
}

struct RunSummary {
    std::string pool_label;
    std::string scheduler;
    int instances = 0;
    double makespan_s = 0.0;
    double mean_utilization = 0.0;

    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

inline RunSummary summarize(const Timeline& timeline) {
    return {timeline.pool_label, timeline.scheduler, timeline.instances, makespan(timeline),
            utilization(timeline).mean};
}

inline RunSummary summarize(const Timeline& timeline, const ResourcePool& pool) {
    return {timeline.pool_label, timeline.scheduler, timeline.instances, makespan(timeline),
            utilization(timeline, pool).mean};
}

} // namespace tiersim
