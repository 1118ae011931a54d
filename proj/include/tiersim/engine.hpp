#pragma once

#include <algorithm>
#include <cassert>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "tiersim/errors.hpp"
#include "tiersim/format.hpp"
#include "tiersim/platform.hpp"
#include "tiersim/schedulers.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

enum class EventKind : int {
    job_arrival = 0,
    transfer_finish = 1,
    task_finish = 2,
};

// Simulation event. Events are totally ordered by (time, kind, job, task,
// pe); that order is the tie-break rule that makes every run reproducible.
struct SimEvent {
    double time = 0.0;
    EventKind kind = EventKind::job_arrival;
    int job = 0;
    int task_idx = -1;
    int pe = -1;

    friend bool operator<(const SimEvent& a, const SimEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        if (a.job != b.job) return a.job < b.job;
        if (a.task_idx != b.task_idx) return a.task_idx < b.task_idx;
        return a.pe < b.pe;
    }

    friend bool operator>(const SimEvent& a, const SimEvent& b) { return b < a; }
};

// One scheduled task instance. The PE is held from transfer_start through
// finish; transferred_mb is what crossed the link before execution began.
struct ScheduleRecord {
    int job = 0;
    int task_id = 0;
    int pe = 0;
    double transfer_start = 0.0;
    double exec_start = 0.0;
    double finish = 0.0;
    double transferred_mb = 0.0;

    friend bool operator==(const ScheduleRecord&, const ScheduleRecord&) = default;
};

// Exit-task output shipped back to the frontend after the task finished.
// Occupies the link, not a PE.
struct ReturnTransfer {
    int job = 0;
    int task_id = 0;
    double volume_mb = 0.0;
    double start = 0.0;
    double finish = 0.0;

    friend bool operator==(const ReturnTransfer&, const ReturnTransfer&) = default;
};

struct Timeline {
    std::vector<ScheduleRecord> records; // in decision order
    std::vector<ReturnTransfer> returns;
    std::string pool_label;
    std::string scheduler;
    int instances = 0;
    double inter_arrival_delay_s = 0.0;
    double first_arrival = 0.0;
    std::vector<std::string> pe_kind_names; // by pe id

    friend bool operator==(const Timeline&, const Timeline&) = default;
};

struct SimOptions {
    CommMode comm_mode = CommMode::location;
    bool result_return = true;
};

// Invoked once per committed decision with the context it was made from.
using DecisionObserver =
    std::function<void(const SchedulerContext&, const SchedulingDecision&)>;

// Time from the first job arrival to the last completion, including
// result-return transfers when they were produced.
inline double makespan(const Timeline& timeline) {
    if (timeline.records.empty()) throw ValidationError("makespan of an empty timeline");
    double last = timeline.records.front().finish;
    for (const ScheduleRecord& r : timeline.records) last = std::max(last, r.finish);
    for (const ReturnTransfer& r : timeline.returns) last = std::max(last, r.finish);
    return last - timeline.first_arrival;
}

namespace detail {

class Simulation {
public:
    Simulation(const DagView& dag, const JobSubmission& submission, const ResourcePool& pool,
               SchedulerKind scheduler, LinkModel link, SimOptions options,
               const DecisionObserver* observer)
        : dag_(dag),
          pool_(pool),
          view_(pool, dag),
          link_(link),
          options_(options),
          scheduler_(scheduler),
          observer_(observer),
          jobs_(submission.instances),
          locations_(submission.instances, dag.size()),
          completed_(static_cast<std::size_t>(submission.instances) * dag.size(), false),
          pending_inputs_(static_cast<std::size_t>(submission.instances) * dag.size(), 0) {
        pe_states_.reserve(view_.size());
        for (int pe = 0; pe < view_.size(); ++pe) pe_states_.push_back({pe, 0.0});

        for (int job = 0; job < jobs_; ++job) {
            for (int t = 0; t < dag_.size(); ++t)
                pending_inputs_[flat(job, t)] = static_cast<int>(dag_.inputs[t].size());
            push({job * submission.inter_arrival_delay_s, EventKind::job_arrival, job});
        }

        timeline_.pool_label = pool.label;
        timeline_.scheduler = scheduler_name(scheduler);
        timeline_.instances = submission.instances;
        timeline_.inter_arrival_delay_s = submission.inter_arrival_delay_s;
        timeline_.first_arrival = 0.0;
        for (const PeInstance& pe : pool.instances)
            timeline_.pe_kind_names.push_back(pe.kind.name);
    }

    Timeline run() {
        while (!events_.empty()) {
            SimEvent e = pop();
            assert(e.time >= clock_);
            clock_ = e.time;
            apply(e);
            schedule_ready();
        }
        assert(finished_count_ == static_cast<long long>(jobs_) * dag_.size());
        return std::move(timeline_);
    }

private:
    std::size_t flat(int job, int task_idx) const {
        return static_cast<std::size_t>(job) * dag_.size() + task_idx;
    }

    void push(SimEvent e) { events_.push(e); }

    SimEvent pop() {
        SimEvent e = events_.top();
        events_.pop();
        return e;
    }

    void apply(const SimEvent& e) {
        switch (e.kind) {
            case EventKind::job_arrival:
                for (int t : dag_.entries) insert_ready({clock_, e.job, t});
                break;
            case EventKind::task_finish: {
                completed_[flat(e.job, e.task_idx)] = true;
                ++finished_count_;
                locations_.set(e.job, e.task_idx, view_.tier_by_pe[e.pe]);
                for (int succ : dag_.successors[e.task_idx])
                    if (--pending_inputs_[flat(e.job, succ)] == 0)
                        insert_ready({clock_, e.job, succ});
                maybe_return_result(e);
                break;
            }
            case EventKind::transfer_finish:
                break; // link bookkeeping happens at reservation time
        }
    }

    void insert_ready(ReadyEntry r) {
        ready_.insert(std::upper_bound(ready_.begin(), ready_.end(), r), r);
    }

    // Result-return: outputs produced on the backend travel back to the
    // frontend once their exit task completes. Skipped in fixed comm mode,
    // where the producing task already paid for its output volume.
    void maybe_return_result(const SimEvent& e) {
        if (!options_.result_return || options_.comm_mode != CommMode::location) return;
        if (!dag_.is_exit(e.task_idx)) return;
        if (view_.tier_by_pe[e.pe] != Tier::backend) return;

        double volume = dag_.out_mb[e.task_idx];
        double start = clock_;
        double duration = transfer_time(volume, link_);
        if (link_.contention == Contention::serialized && volume > 0) {
            start = std::max(start, link_free_at_);
            link_free_at_ = start + duration;
        }
        double finish = start + duration;
        timeline_.returns.push_back({e.job, dag_.task_ids[e.task_idx], volume, start, finish});
        push({finish, EventKind::transfer_finish, e.job, e.task_idx, e.pe});
    }

    void schedule_ready() {
        while (!ready_.empty()) {
            SchedulerContext ctx;
            ctx.clock = clock_;
            ctx.ready = &ready_;
            ctx.pe_states = &pe_states_;
            ctx.locations = &locations_;
            ctx.link = link_;
            ctx.dag = &dag_;
            ctx.pool = &view_;
            ctx.comm_mode = options_.comm_mode;
            ctx.rr_cursor = rr_cursor_;

            SchedulingDecision d = select_decision(scheduler_, ctx);
            if (observer_ && *observer_) (*observer_)(ctx, d);
            if (scheduler_ == SchedulerKind::rr)
                rr_cursor_ = (rr_cursor_ + 1) % view_.size();
            commit(ctx, d);
        }
    }

    void commit(const SchedulerContext& ctx, const SchedulingDecision& d) {
        auto erased = std::find_if(ready_.begin(), ready_.end(), [&](const ReadyEntry& r) {
            return r.job == d.job && r.task_idx == d.task_idx;
        });
        assert(erased != ready_.end());
        ready_.erase(erased);

        auto t = detail::predict_times(ctx, d.job, d.task_idx, d.pe);
        double transfer_start = t.transfer_start;
        double exec_start = t.exec_start;
        double finish = t.finish;
        if (link_.contention == Contention::serialized && t.volume_mb > 0) {
            // One boundary transfer at a time; grants follow request order.
            transfer_start = std::max(transfer_start, link_free_at_);
            double duration = transfer_time(t.volume_mb, link_);
            link_free_at_ = transfer_start + duration;
            exec_start = transfer_start + duration;
            finish = exec_start + ctx.exec_time(d.task_idx, d.pe);
        }

        assert(pe_states_[d.pe].available_at <= finish);
        pe_states_[d.pe].available_at = finish;

        timeline_.records.push_back({d.job, dag_.task_ids[d.task_idx], d.pe, transfer_start,
                                     exec_start, finish, t.volume_mb});
        push({finish, EventKind::task_finish, d.job, d.task_idx, d.pe});
        if (t.volume_mb > 0)
            push({exec_start, EventKind::transfer_finish, d.job, d.task_idx, d.pe});
    }

    const DagView& dag_;
    const ResourcePool& pool_;
    PoolView view_;
    LinkModel link_;
    SimOptions options_;
    SchedulerKind scheduler_;
    const DecisionObserver* observer_;

    int jobs_;
    double clock_ = 0.0;
    double link_free_at_ = 0.0;
    int rr_cursor_ = 0;
    long long finished_count_ = 0;

    std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<SimEvent>> events_;
    std::vector<ReadyEntry> ready_; // kept sorted
    std::vector<PeState> pe_states_;
    DataLocations locations_;
    std::vector<bool> completed_;
    std::vector<int> pending_inputs_;
    Timeline timeline_;
};

} // namespace detail

// Runs all job instances of `dag` on `pool` to completion under the given
// policy. Deterministic: identical inputs produce identical timelines.
inline Timeline run_simulation(const WorkloadDag& dag, const JobSubmission& submission,
                               const ResourcePool& pool, SchedulerKind scheduler,
                               LinkModel link = {}, SimOptions options = {},
                               const DecisionObserver* observer = nullptr) {
    if (submission.instances < 1) throw ValidationError("instances must be >= 1");
    if (submission.inter_arrival_delay_s < 0)
        throw ValidationError("inter-arrival delay must be >= 0");
    DagView view(dag);
    detail::Simulation sim(view, submission, pool, scheduler, link, options, observer);
    return sim.run();
}

// Line-per-record export, sorted by (finish, job, task).
inline std::string export_timeline(const Timeline& timeline) {
    std::vector<ScheduleRecord> rows = timeline.records;
    std::sort(rows.begin(), rows.end(), [](const ScheduleRecord& a, const ScheduleRecord& b) {
        if (a.finish != b.finish) return a.finish < b.finish;
        if (a.job != b.job) return a.job < b.job;
        return a.task_id < b.task_id;
    });
    std::string out = "job,task,pe,kind,transfer_start,exec_start,finish,transferred_mb\n";
    for (const ScheduleRecord& r : rows) {
        out += std::to_string(r.job) + ',' + std::to_string(r.task_id) + ',' +
               std::to_string(r.pe) + ',' + timeline.pe_kind_names[r.pe] + ',' +
               format_double(r.transfer_start) + ',' + format_double(r.exec_start) + ',' +
               format_double(r.finish) + ',' + format_double(r.transferred_mb) + '\n';
    }
    return out;
}

} // namespace tiersim
