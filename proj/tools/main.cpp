// tiersim command-line front door: single runs, the two sweep experiments,
// and one-shot continuous-query evaluation.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <tiersim/tiersim.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw tiersim::IoError("cannot read: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Flags shared by the simulation subcommands.
struct CommonFlags {
    std::string workload_path;
    std::string pool_path;
    std::string scheduler = "eft";
    int instances = 100;
    double delay_s = 0.0;
    double mbps = 12.0;
    std::string contention = "none";
    std::string comm_mode = "location";
    std::string result_return = "on";
    std::string csv_path;
    std::string svg_path;
    std::string timeline_path;

    CLI::Option* mbps_opt = nullptr;
    CLI::Option* contention_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool with_pool, bool with_scheduler) {
    cmd->add_option("--workload", f.workload_path, "Workload JSON (default: built-in pipeline)");
    if (with_pool)
        cmd->add_option("--pool", f.pool_path, "Pool JSON (default: built-in full pool)");
    if (with_scheduler)
        cmd->add_option("--scheduler", f.scheduler, "Scheduling policy: eft | etf | rr");
    cmd->add_option("--instances", f.instances, "Concurrent pipeline instances");
    cmd->add_option("--delay", f.delay_s, "Inter-arrival delay between instances, seconds");
    f.mbps_opt = cmd->add_option("--mbps", f.mbps, "Edge<->server link rate, Mbps");
    f.contention_opt =
        cmd->add_option("--contention", f.contention, "Link contention: none | serial");
    cmd->add_option("--comm-mode", f.comm_mode, "Transfer charging: location | static");
    cmd->add_option("--result-return", f.result_return, "Ship results back to the edge: on | off");
    cmd->add_option("--csv", f.csv_path, "Write the result table as CSV");
    cmd->add_option("--svg", f.svg_path, "Write the result table as an SVG bar chart");
    cmd->add_option("--timeline", f.timeline_path, "Write the full schedule as CSV");
}

// Resolves flag values into a runnable spec; flag errors become exit code 2.
struct ResolvedRun {
    tiersim::ExperimentSpec spec;
    tiersim::ResourcePool pool;
    tiersim::SchedulerKind scheduler = tiersim::SchedulerKind::eft;
};

ResolvedRun resolve(const CommonFlags& f) {
    ResolvedRun r;
    if (f.workload_path.empty())
        r.spec.workload = tiersim::canonical_ds_workload();
    else
        r.spec.workload = tiersim::parse_workload(read_file(f.workload_path));

    if (f.pool_path.empty()) {
        r.pool = tiersim::best_mixed_pool();
    } else {
        tiersim::PoolDocument doc = tiersim::parse_pool(read_file(f.pool_path));
        r.pool = doc.pool;
        r.spec.link = doc.link;
    }
    if (f.mbps_opt && f.mbps_opt->count() > 0) r.spec.link.mbps = f.mbps;
    if (f.contention_opt && f.contention_opt->count() > 0) {
        if (f.contention == "none")
            r.spec.link.contention = tiersim::Contention::none;
        else if (f.contention == "serial")
            r.spec.link.contention = tiersim::Contention::serialized;
        else
            throw UsageError("unknown contention mode: " + f.contention);
    }

    auto sched = tiersim::parse_scheduler(f.scheduler);
    if (!sched) throw UsageError("unknown scheduler: " + f.scheduler);
    r.scheduler = *sched;

    auto mode = tiersim::parse_comm_mode(f.comm_mode);
    if (!mode) throw UsageError("unknown comm mode: " + f.comm_mode);
    r.spec.options.comm_mode = *mode;

    if (f.result_return == "on")
        r.spec.options.result_return = true;
    else if (f.result_return == "off")
        r.spec.options.result_return = false;
    else
        throw UsageError("--result-return expects on|off, got: " + f.result_return);

    if (f.instances < 1) throw UsageError("--instances must be >= 1");
    if (f.delay_s < 0) throw UsageError("--delay must be >= 0");
    r.spec.instances = f.instances;
    r.spec.inter_arrival_delay_s = f.delay_s;
    return r;
}

int cmd_simulate(const CommonFlags& f) {
    ResolvedRun r = resolve(f);
    tiersim::Timeline t = tiersim::run_simulation(
        r.spec.workload, {r.spec.instances, r.spec.inter_arrival_delay_s}, r.pool, r.scheduler,
        r.spec.link, r.spec.options);
    std::vector<tiersim::RunSummary> rows{tiersim::summarize(t, r.pool)};
    std::cout << tiersim::to_csv(rows);
    if (!f.csv_path.empty()) tiersim::write_file(f.csv_path, tiersim::to_csv(rows));
    if (!f.svg_path.empty())
        tiersim::write_file(f.svg_path, tiersim::to_svg(rows, "Makespan"));
    if (!f.timeline_path.empty())
        tiersim::write_file(f.timeline_path, tiersim::export_timeline(t));
    return kExitOk;
}

int cmd_sweep_pools(const CommonFlags& f) {
    ResolvedRun r = resolve(f);
    tiersim::ResultTable table = tiersim::sweep_pools(r.spec, {}, r.scheduler);
    std::cout << tiersim::to_csv(table.rows);
    const tiersim::RunSummary& best = tiersim::best_row(table);
    std::cout << "best," << best.pool_label << "," << tiersim::format_double(best.makespan_s)
              << "\n";
    tiersim::emit_outputs(table.rows, f.csv_path, f.svg_path,
                          "Makespan by resource pool (" + best.scheduler + ")");
    return kExitOk;
}

int cmd_sweep_schedulers(const CommonFlags& f) {
    ResolvedRun r = resolve(f);
    tiersim::ResultTable table = tiersim::sweep_schedulers(r.spec, r.pool);
    std::cout << tiersim::to_csv(table.rows);
    for (const tiersim::SchedulerDelta& d : tiersim::deltas_vs_rr(table))
        std::cout << d.scheduler << " vs rr: makespan -"
                  << tiersim::format_percent(d.makespan_reduction_pct)
                  << "%, mean utilization +"
                  << tiersim::format_percent(d.utilization_gain_pct) << "%\n";
    tiersim::emit_outputs(table.rows, f.csv_path, f.svg_path,
                          "Makespan by scheduler on " + r.pool.label);
    return kExitOk;
}

struct StreamFlags {
    std::string query;
    std::string store_path;
    int count = 32;
    double start_ts = 0.0;
    double step_s = 10.0;
    unsigned seed = 7;
    std::size_t capacity = 16;
    double now = -1.0; // default: timestamp of the newest tuple
    CLI::Option* start_opt = nullptr;
    CLI::Option* now_opt = nullptr;
};

int cmd_stream_eval(const StreamFlags& f) {
    tiersim::ContinuousQuery q = tiersim::parse_query(f.query);

    tiersim::HistoricStore store(q.historic_source);
    if (!f.store_path.empty()) tiersim::load_store_file(store, f.store_path);

    double start = f.start_ts;
    if ((!f.start_opt || f.start_opt->count() == 0) && store.size() > 0)
        start = store.all().back().timestamp + f.step_s;

    tiersim::BoundedBuffer buffer(f.capacity, &store);
    double last_ts = store.size() > 0 ? store.all().back().timestamp : 0.0;
    for (tiersim::StreamTuple& t :
         tiersim::synthetic_speed_stream(f.count, start, f.step_s, f.seed)) {
        last_ts = t.timestamp;
        buffer.push(std::move(t));
    }

    double now = (f.now_opt && f.now_opt->count() > 0) ? f.now : last_ts;
    tiersim::anchor_query(q, now);
    std::optional<tiersim::StreamTuple> result = tiersim::evaluate(q, store, buffer, now);
    if (result)
        std::cout << tiersim::serialize_tuple(*result) << "\n";
    else
        std::cout << "no data in window\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-tier pipeline scheduling simulator and stream-query evaluator"};
    app.require_subcommand(1);

    CommonFlags sim_f, pools_f, scheds_f;
    StreamFlags stream_f;

    CLI::App* sim = app.add_subcommand("simulate", "Run one workload on one pool");
    add_common_flags(sim, sim_f, true, true);

    CLI::App* pools = app.add_subcommand(
        "sweep-pools", "Makespan across the 3x3 arm/xeon grid plus edge-only and server-only");
    add_common_flags(pools, pools_f, false, true);

    CLI::App* scheds =
        app.add_subcommand("sweep-schedulers", "Compare eft, etf and rr on one pool");
    add_common_flags(scheds, scheds_f, true, false);

    CLI::App* stream = app.add_subcommand(
        "stream-eval", "Evaluate a continuous query against a store file plus a synthetic stream");
    stream->add_option("--query", stream_f.query, "Continuous-query text")->required();
    stream->add_option("--store", stream_f.store_path, "Historic store file");
    stream->add_option("--count", stream_f.count, "Synthetic live tuples to generate");
    stream_f.start_opt = stream->add_option("--start", stream_f.start_ts,
                                            "First synthetic timestamp (default: after store)");
    stream->add_option("--step", stream_f.step_s, "Seconds between synthetic tuples");
    stream->add_option("--seed", stream_f.seed, "Synthetic stream seed");
    stream->add_option("--buffer-capacity", stream_f.capacity, "Live buffer capacity");
    stream_f.now_opt =
        stream->add_option("--now", stream_f.now, "Evaluation time (default: newest tuple)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_f);
        if (pools->parsed()) return cmd_sweep_pools(pools_f);
        if (scheds->parsed()) return cmd_sweep_schedulers(scheds_f);
        if (stream->parsed()) return cmd_stream_eval(stream_f);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tiersim::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tiersim::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tiersim::WindowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const tiersim::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
