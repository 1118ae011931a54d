#include <catch2/catch_amalgamated.hpp>

#include <tiersim/engine.hpp>
#include <tiersim/metrics.hpp>

using namespace tiersim;

namespace {

Timeline make_timeline(std::vector<ScheduleRecord> records,
                       std::vector<std::string> kinds) {
    Timeline t;
    t.records = std::move(records);
    t.pe_kind_names = std::move(kinds);
    t.pool_label = "hand";
    t.scheduler = "eft";
    t.instances = 1;
    return t;
}

} // namespace

TEST_CASE("a fully busy PE scores 1.0", "[metrics]") {
    Timeline t = make_timeline({{0, 0, 0, 0.0, 0.0, 10.0, 0.0}}, {"arm-cpu"});
    UtilizationReport rep = utilization(t);
    CHECK(rep.busy_s.at(0) == 10.0);
    CHECK(rep.per_pe.at(0) == 1.0);
    CHECK(rep.mean == 1.0);
}

TEST_CASE("utilization averages over every PE", "[metrics]") {
    // PE 0 busy the whole 10 s, PE 1 busy half of it.
    Timeline t = make_timeline({{0, 0, 0, 0.0, 0.0, 10.0, 0.0},
                                {0, 1, 1, 0.0, 2.0, 7.0, 0.0}},
                               {"arm-cpu", "xeon-cpu"});
    UtilizationReport rep = utilization(t);
    CHECK(rep.per_pe.at(0) == 1.0);
    CHECK(rep.per_pe.at(1) == 0.5);
    CHECK(rep.mean == 0.75);

    SECTION("an idle PE drags the mean down without touching the makespan") {
        t.pe_kind_names.push_back("tesla-gpu");
        UtilizationReport rep3 = utilization(t);
        CHECK(rep3.per_pe.at(2) == 0.0);
        CHECK(rep3.mean == 0.5);
        CHECK(makespan(t) == 10.0);
    }
}

TEST_CASE("transfer time is not busy time", "[metrics]") {
    // 4 s of transfer followed by 6 s of execution: only the 6 count.
    Timeline t = make_timeline({{0, 0, 0, 0.0, 4.0, 10.0, 48.0}}, {"xeon-cpu"});
    UtilizationReport rep = utilization(t);
    CHECK(rep.busy_s.at(0) == 6.0);
    CHECK(rep.per_pe.at(0) == 0.6);
}

TEST_CASE("busy fractions never exceed one on real runs", "[metrics]") {
    Timeline t = run_simulation(canonical_ds_workload(), {6, 2.0}, best_mixed_pool(),
                                SchedulerKind::eft, {});
    UtilizationReport rep = utilization(t);
    CHECK(rep.per_pe.size() == static_cast<std::size_t>(best_mixed_pool().size()));
    for (std::size_t pe = 0; pe < rep.per_pe.size(); ++pe) {
        CAPTURE(pe);
        CHECK(rep.per_pe[pe] >= 0.0);
        CHECK(rep.per_pe[pe] <= 1.0);
    }
    CHECK(rep.mean > 0.0);
    CHECK(rep.mean <= 1.0);
}

TEST_CASE("the pool-aware overload cross-checks shape", "[metrics]") {
    Timeline t = run_simulation(canonical_ds_workload(), {}, best_mixed_pool(),
                                SchedulerKind::etf, {});
    UtilizationReport a = utilization(t);
    UtilizationReport b = utilization(t, best_mixed_pool());
    CHECK(a.mean == b.mean);

    ResourcePool wrong;
    wrong.instances = {{0, {"arm-cpu", Tier::frontend}}};
    wrong.label = "tiny";
    CHECK_THROWS_AS(utilization(t, wrong), ValidationError);
}

TEST_CASE("degenerate timelines are rejected", "[metrics]") {
    CHECK_THROWS_AS(utilization(Timeline{}), ValidationError);
    // Zero-duration makespan cannot be normalized against.
    Timeline z = make_timeline({{0, 0, 0, 0.0, 0.0, 0.0, 0.0}}, {"arm-cpu"});
    CHECK_THROWS_AS(utilization(z), ValidationError);
}

TEST_CASE("summaries carry the run configuration", "[metrics]") {
    Timeline t = run_simulation(canonical_ds_workload(), {2, 1.0}, best_mixed_pool(),
                                SchedulerKind::rr, {});
    RunSummary s = summarize(t);
    CHECK(s.pool_label == "arm3-xeon3");
    CHECK(s.scheduler == "rr");
    CHECK(s.instances == 2);
    CHECK(s.makespan_s == makespan(t));
    CHECK(s.mean_utilization == utilization(t).mean);

    RunSummary s2 = summarize(t, best_mixed_pool());
    CHECK(s == s2);
}
