#include "mlb/simkernel.hpp"

#include "mlb/admission.hpp"
#include "mlb/coordination.hpp"
#include "mlb/placement.hpp"
#include "mlb/validate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

namespace mlb {

namespace {

enum class MsgKind {
    Election,
    CoordinatorAnnouncement,
    ObservationReport,
    CapabilityMulticast,
    AdjustLoadDistribution,
};

const char* msg_kind_name(MsgKind kind) {
    switch (kind) {
    case MsgKind::Election: return "election";
    case MsgKind::CoordinatorAnnouncement: return "coordinator_announcement";
    case MsgKind::ObservationReport: return "observation_report";
    case MsgKind::CapabilityMulticast: return "capability_multicast";
    case MsgKind::AdjustLoadDistribution: return "adjust_load_distribution";
    }
    return "unknown";
}

struct WireMessage {
    MsgKind kind = MsgKind::Election;
    SchedulerId from = 0;
    SchedulerId to = 0;
    double send_time = 0.0;
    Interval interval = 0;

    // Election
    double responding_time = 0.0;
    double capacity_score = 0.0;
    int round = 0;

    // CoordinatorAnnouncement
    SchedulerId winner = 0;

    // ObservationReport: per-processor counts plus the sender's interval
    // throughput monitor (completions and end-of-interval backlog).
    std::vector<Observation> observations;
    std::uint64_t completed = 0;
    std::uint64_t backlog = 0;

    // CapabilityMulticast
    std::map<ProcessorId, CapabilityEstimate> table;
    double total_tasks = 0.0;

    // AdjustLoadDistribution: per-scheduler quotas plus the coordinator's
    // joint (scheduler x processor) allocation of the next interval's tasks.
    std::map<SchedulerId, std::uint64_t> quotas;
    std::map<SchedulerId, std::map<ProcessorId, std::uint64_t>> allocations;
    CorrectionReport correction;
    bool correction_valid = false;
    double cluster_capacity = 0.0;
    std::uint64_t total_requests = 0;
    double census = 0.0;
};

struct EngineEvent {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::TaskArrival;

    TaskId task = 0;                  // TaskArrival
    SchedulerId scheduler = 0;        // DispatchTick
    ProcessorId processor = 0;        // TaskComplete
    std::uint64_t epoch = 0;          // TaskComplete cancellation guard
    Interval boundary = 0;            // FeedbackInterval boundary index
    std::size_t fault_index = 0;      // Fault
    int election_round = 0;           // ElectionTimeout
    std::shared_ptr<WireMessage> msg; // MessageDeliver
};

struct EventAfter {
    bool operator()(const EngineEvent& a, const EngineEvent& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

struct ProcState {
    ProcessorSpec spec;
    bool up = true;
    std::deque<TaskId> queue; // front is in service
    std::uint64_t epoch = 0;  // bumped on crash to void pending completions
};

struct SchedState {
    Scheduler core; // protocol fields: role, observations, table, missed count
    bool up = true;

    // Quota window installed by the latest load-distribution message; absent
    // (or zero-quota, which carries no information) means uncapped dispatch
    // with an even split across Up processors.
    bool has_window = false;
    std::map<ProcessorId, std::uint64_t> allocation; // remaining per processor

    // Current-interval monitors.
    std::map<ProcessorId, std::uint64_t> processed_now; // X per processor
    std::uint64_t completed_in_interval = 0;

    bool multicast_seen_this_period = false;
    bool tick_pending = false;

    std::vector<ElectionMessage> election_inbox;
};

struct TaskRuntime {
    enum class Loc { Unborn, Handler, AtScheduler, AtProcessor, Completed, Dropped };
    Task task;
    Loc loc = Loc::Unborn;
    SchedulerId owner = 0;     // scheduler that queued or issued it
    ProcessorId processor = 0; // valid when loc == AtProcessor
};

// Coordinator-side gathering of one interval's observation reports.
struct Collection {
    Interval interval = 0;
    std::set<SchedulerId> expected;
    std::set<SchedulerId> received;
    std::vector<Observation> observations;
    struct Monitor {
        SchedulerId scheduler = 0;
        std::uint64_t completed = 0;
        std::uint64_t backlog = 0;
    };
    std::vector<Monitor> monitors;
    double census = 0.0;      // handler task census for the interval (beta input)
    std::uint64_t routed = 0; // TR_t: tasks routed to schedulers in the interval
};

class Engine {
public:
    explicit Engine(const Scenario& scenario) : scenario_(scenario) {}

    EventTrace run();

private:
    void init();

    void on_arrival(const EngineEvent& ev);
    void on_dispatch(const EngineEvent& ev);
    void on_complete(const EngineEvent& ev);
    void on_message(const EngineEvent& ev);
    void on_tick(const EngineEvent& ev);
    void on_fault(const EngineEvent& ev);
    void on_election_timeout(const EngineEvent& ev);

    void schedule(EngineEvent ev);
    void request_dispatch(SchedulerId sid, double now);
    nlohmann::ordered_json handler_dispatch(double now);
    void start_service_if_alone(ProcState& proc, double now);
    void send(WireMessage msg, double now);
    void multicast(const WireMessage& msg, double now);
    void begin_election(double now);
    void coordinator_compute(Collection& col, double now);
    std::map<ProcessorId, std::uint64_t> even_split_allocation(SchedulerId sid,
                                                               std::uint64_t amount) const;
    std::vector<SchedulerId> live_schedulers() const;
    std::vector<ProcessorId> up_processors() const;
    void reclaim_to_handler(const std::vector<TaskId>& ids);
    void record(double time, EventKind kind, nlohmann::ordered_json payload);

    const Scenario& scenario_;
    std::vector<Task> tasks_order_;
    std::vector<FaultSpec> faults_sorted_;
    std::map<TaskId, TaskRuntime> tasks_;
    std::map<ProcessorId, ProcState> procs_;
    std::map<SchedulerId, SchedState> scheds_;

    std::priority_queue<EngineEvent, std::vector<EngineEvent>, EventAfter> queue_;
    std::uint64_t next_seq_ = 0;
    EventTrace trace_;

    // Task handler (admission actor) state. The handler keeps a shadow count
    // of every dispatched task until completion, which is what makes reclaim
    // and the census well defined.
    std::deque<TaskId> handler_queue_;
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen_;
    std::size_t rr_cursor_ = 0;
    std::uint64_t admitted_ = 0;
    std::uint64_t completed_ = 0;
    std::uint64_t outstanding_at_boundary_ = 0;
    std::uint64_t admitted_in_interval_ = 0;
    std::uint64_t routed_in_interval_ = 0;

    // Cluster / coordinator state.
    double cluster_capacity_ = 0.0;
    SchedulerId coordinator_ = 0; // last announced coordinator, possibly dead
    std::map<Interval, Collection> collections_;
    int election_round_ = 0;
    bool election_active_ = false;

    double horizon_ = 0.0;
};

void Engine::schedule(EngineEvent ev) {
    ev.seq = next_seq_++;
    queue_.push(std::move(ev));
}

void Engine::record(double time, EventKind kind, nlohmann::ordered_json payload) {
    TraceRecord rec;
    rec.time = time;
    rec.seq = trace_.records.empty() ? 0 : trace_.records.back().seq + 1;
    rec.kind = kind;
    rec.payload = std::move(payload);
    trace_.records.push_back(std::move(rec));
}

std::vector<SchedulerId> Engine::live_schedulers() const {
    std::vector<SchedulerId> out;
    for (const auto& [id, s] : scheds_) {
        if (s.up) out.push_back(id);
    }
    return out;
}

std::vector<ProcessorId> Engine::up_processors() const {
    std::vector<ProcessorId> out;
    for (const auto& [id, p] : procs_) {
        if (p.up) out.push_back(id);
    }
    return out;
}

void Engine::init() {
    tasks_order_ = materialize_tasks(scenario_);
    for (const Task& t : tasks_order_) {
        TaskRuntime rt;
        rt.task = t;
        tasks_[t.id] = rt;
    }
    for (const ProcessorSpec& spec : scenario_.processors) {
        ProcState p;
        p.spec = spec;
        procs_[spec.id] = p;
    }
    for (std::uint32_t i = 0; i < scenario_.n_schedulers; ++i) {
        SchedState s;
        s.core.id = i + 1;
        if (i < scenario_.scheduler_capacity_scores.size()) {
            s.core.capacity_score = scenario_.scheduler_capacity_scores[i];
        }
        scheds_[s.core.id] = s;
    }
    // The lowest scheduler id starts as coordinator, before any election.
    coordinator_ = scheds_.begin()->first;
    scheds_.begin()->second.core.role = SchedulerRole::Coordinator;

    cluster_capacity_ = initial_cluster_capacity(scenario_);
    horizon_ = effective_horizon(scenario_, tasks_order_);

    // First interval boundary; later ticks chain themselves up to the horizon.
    if (scenario_.feedback_interval <= horizon_) {
        EngineEvent tick;
        tick.time = scenario_.feedback_interval;
        tick.kind = EventKind::FeedbackInterval;
        tick.boundary = 1;
        schedule(tick);
    }
    for (const Task& t : tasks_order_) {
        EngineEvent ev;
        ev.time = t.arrival_time;
        ev.kind = EventKind::TaskArrival;
        ev.task = t.id;
        schedule(ev);
    }
    faults_sorted_ = scenario_.fault_schedule;
    std::stable_sort(faults_sorted_.begin(), faults_sorted_.end(),
                     [](const FaultSpec& a, const FaultSpec& b) { return a.time < b.time; });
    for (std::size_t i = 0; i < faults_sorted_.size(); ++i) {
        EngineEvent ev;
        ev.time = faults_sorted_[i].time;
        ev.kind = EventKind::Fault;
        ev.fault_index = i;
        schedule(ev);
    }
}

EventTrace Engine::run() {
    const auto violations = validate_scenario(scenario_);
    if (!violations.empty()) {
        throw ScenarioError("scenario failed validation: " + violations.front().entity + ": " +
                            violations.front().message);
    }
    init();
    while (!queue_.empty()) {
        EngineEvent ev = queue_.top();
        queue_.pop();
        switch (ev.kind) {
        case EventKind::TaskArrival: on_arrival(ev); break;
        case EventKind::DispatchTick: on_dispatch(ev); break;
        case EventKind::TaskComplete: on_complete(ev); break;
        case EventKind::MessageDeliver: on_message(ev); break;
        case EventKind::FeedbackInterval: on_tick(ev); break;
        case EventKind::Fault: on_fault(ev); break;
        case EventKind::ElectionTimeout: on_election_timeout(ev); break;
        }
    }
    trace_.truncated = completed_ < admitted_;
    return std::move(trace_);
}

void Engine::on_arrival(const EngineEvent& ev) {
    TaskRuntime& rt = tasks_.at(ev.task);
    const Task& task = rt.task;

    nlohmann::ordered_json payload;
    payload["task"] = task.id;
    payload["user"] = task.user_id;
    payload["fingerprint"] = task.payload_fingerprint;
    payload["size"] = task.size;
    payload["cost"] = task.cost;
    payload["deadline"] = task.deadline_hint;

    if (!seen_.insert({task.user_id, task.payload_fingerprint}).second) {
        rt.loc = TaskRuntime::Loc::Dropped;
        payload["decision"] = "duplicate";
        record(ev.time, EventKind::TaskArrival, std::move(payload));
        return;
    }

    std::vector<Processor> fleet;
    fleet.reserve(procs_.size());
    for (const auto& [id, p] : procs_) {
        Processor proc;
        proc.id = id;
        proc.speed = p.spec.speed;
        proc.bandwidth = p.spec.bandwidth;
        proc.price = p.spec.price;
        proc.energy_rate = p.spec.energy_rate;
        proc.status = p.up ? ProcessorStatus::Up : ProcessorStatus::Down;
        fleet.push_back(proc);
    }
    const auto estimate = cheapest_estimate(task, fleet);
    AdmissionDecision decision;
    if (!estimate) {
        // No capacity estimate available; treated as a time rejection.
        decision = AdmissionDecision::RejectedTime;
    } else {
        decision = sla_admit(task, *estimate, scenario_.sla);
    }

    switch (decision) {
    case AdmissionDecision::RejectedCost:
        rt.loc = TaskRuntime::Loc::Dropped;
        payload["decision"] = "rejected_cost";
        break;
    case AdmissionDecision::RejectedTime:
        rt.loc = TaskRuntime::Loc::Dropped;
        payload["decision"] = "rejected_time";
        break;
    case AdmissionDecision::Accepted:
        rt.loc = TaskRuntime::Loc::Handler;
        ++admitted_;
        ++admitted_in_interval_;
        handler_queue_.push_back(task.id);
        payload["decision"] = "accepted";
        payload["routed"] = handler_dispatch(ev.time);
        break;
    }
    record(ev.time, EventKind::TaskArrival, std::move(payload));
}

nlohmann::ordered_json Engine::handler_dispatch(double now) {
    auto routed = nlohmann::ordered_json::array();
    if (handler_queue_.empty()) return routed;
    const auto live = live_schedulers();
    if (live.empty()) return routed; // tasks remain in the handler

    const std::vector<TaskId> batch(handler_queue_.begin(), handler_queue_.end());
    handler_queue_.clear();
    const RoundRobinResult rr = dispatch_round_robin(batch, live, rr_cursor_);
    rr_cursor_ = rr.new_cursor;
    for (const auto& [tid, sid] : rr.assignments) {
        TaskRuntime& rt = tasks_.at(tid);
        rt.loc = TaskRuntime::Loc::AtScheduler;
        rt.owner = sid;
        scheds_.at(sid).core.output_queue.push_back(tid);
        ++routed_in_interval_;
        routed.push_back({{"task", tid}, {"scheduler", sid}});
        request_dispatch(sid, now);
    }
    return routed;
}

void Engine::request_dispatch(SchedulerId sid, double now) {
    SchedState& s = scheds_.at(sid);
    if (!s.up || s.tick_pending) return;
    s.tick_pending = true;
    EngineEvent ev;
    ev.time = now;
    ev.kind = EventKind::DispatchTick;
    ev.scheduler = sid;
    schedule(ev);
}

// Pre-multicast (and zero-quota) fallback: an even split over Up processors.
// The remainder starts at an id-dependent offset so that schedulers holding a
// single task do not all pile onto the lowest-id machine.
std::map<ProcessorId, std::uint64_t> Engine::even_split_allocation(SchedulerId sid,
                                                                   std::uint64_t amount) const {
    const auto ups = up_processors();
    std::map<ProcessorId, std::uint64_t> out;
    if (ups.empty() || amount == 0) return out;
    const std::uint64_t base = amount / ups.size();
    std::uint64_t remainder = amount % ups.size();
    for (const ProcessorId pid : ups) {
        if (base > 0) out[pid] = base;
    }
    for (std::size_t k = 0; remainder > 0; ++k, --remainder) {
        out[ups[(k + sid - 1) % ups.size()]] += 1;
    }
    return out;
}

void Engine::on_dispatch(const EngineEvent& ev) {
    SchedState& s = scheds_.at(ev.scheduler);
    s.tick_pending = false;
    if (!s.up || s.core.output_queue.empty()) return;

    // Uncapped mode (no quota window yet): even split of the current queue
    // across Up processors, with the ranking choosing within the allocation.
    std::map<ProcessorId, std::uint64_t> transient;
    std::map<ProcessorId, std::uint64_t>* alloc = &s.allocation;
    if (!s.has_window) {
        transient = even_split_allocation(s.core.id, s.core.output_queue.size());
        alloc = &transient;
    }

    auto issued = nlohmann::ordered_json::array();
    while (!s.core.output_queue.empty()) {
        std::set<ProcessorId> candidates;
        for (const auto& [pid, remaining] : *alloc) {
            if (remaining > 0 && procs_.at(pid).up) candidates.insert(pid);
        }
        if (candidates.empty()) break; // wait for the next quota window

        const TaskId tid = s.core.output_queue.front();
        TaskRuntime& rt = tasks_.at(tid);
        std::map<std::pair<TaskId, ProcessorId>, ObjectiveTriple> triples;
        for (ProcessorId pid : candidates) {
            const ProcessorSpec& spec = procs_.at(pid).spec;
            ObjectiveTriple t;
            t.response_time = response_time(rt.task.size, spec.bandwidth, spec.speed);
            t.energy = energy(rt.task.size, spec.speed, spec.energy_rate);
            t.profit = profit(rt.task.size, spec.speed, spec.price, rt.task.cost);
            triples[{tid, pid}] = t;
        }
        const ProcessorId winner = rank_assign(triples, candidates).assignment.at(tid);

        s.core.output_queue.erase(s.core.output_queue.begin());
        --(*alloc)[winner];
        rt.loc = TaskRuntime::Loc::AtProcessor;
        rt.processor = winner;
        ProcState& proc = procs_.at(winner);
        proc.queue.push_back(tid);
        start_service_if_alone(proc, ev.time);
        issued.push_back({{"task", tid}, {"processor", winner}});
    }

    if (!issued.empty()) {
        nlohmann::ordered_json payload;
        payload["scheduler"] = s.core.id;
        payload["issued"] = std::move(issued);
        record(ev.time, EventKind::DispatchTick, std::move(payload));
    }
}

void Engine::start_service_if_alone(ProcState& proc, double now) {
    if (proc.queue.size() != 1) return;
    const TaskRuntime& rt = tasks_.at(proc.queue.front());
    EngineEvent done;
    done.time = now + response_time(rt.task.size, proc.spec.bandwidth, proc.spec.speed);
    done.kind = EventKind::TaskComplete;
    done.task = rt.task.id;
    done.processor = proc.spec.id;
    done.epoch = proc.epoch;
    schedule(done);
}

void Engine::on_complete(const EngineEvent& ev) {
    ProcState& proc = procs_.at(ev.processor);
    if (!proc.up || ev.epoch != proc.epoch) return; // voided by a crash
    if (proc.queue.empty() || proc.queue.front() != ev.task) return;

    proc.queue.pop_front();
    TaskRuntime& rt = tasks_.at(ev.task);
    rt.loc = TaskRuntime::Loc::Completed;
    ++completed_;
    const double response = ev.time - rt.task.arrival_time;
    const bool violation = response > rt.task.deadline_hint;

    auto owner_it = scheds_.find(rt.owner);
    if (owner_it != scheds_.end() && owner_it->second.up) {
        ++owner_it->second.processed_now[ev.processor];
        ++owner_it->second.completed_in_interval;
    }

    if (!proc.queue.empty()) {
        const TaskRuntime& next = tasks_.at(proc.queue.front());
        EngineEvent done;
        done.time = ev.time + response_time(next.task.size, proc.spec.bandwidth, proc.spec.speed);
        done.kind = EventKind::TaskComplete;
        done.task = next.task.id;
        done.processor = proc.spec.id;
        done.epoch = proc.epoch;
        schedule(done);
    }

    nlohmann::ordered_json payload;
    payload["task"] = ev.task;
    payload["processor"] = ev.processor;
    payload["scheduler"] = rt.owner;
    payload["response"] = response;
    payload["violation"] = violation;
    record(ev.time, EventKind::TaskComplete, std::move(payload));
}

void Engine::send(WireMessage msg, double now) {
    msg.send_time = now;
    EngineEvent ev;
    ev.time = now + scenario_.message_latency;
    ev.kind = EventKind::MessageDeliver;
    ev.msg = std::make_shared<WireMessage>(std::move(msg));
    schedule(ev);
}

void Engine::multicast(const WireMessage& msg, double now) {
    for (const SchedulerId sid : live_schedulers()) {
        WireMessage copy = msg;
        copy.to = sid;
        send(std::move(copy), now);
    }
}

void Engine::on_tick(const EngineEvent& ev) {
    const Interval closed = ev.boundary - 1;
    const double now = ev.time;

    bool any_detection = false;
    for (auto& [sid, s] : scheds_) {
        if (!s.up) continue;

        // Close the interval's observations: X from the live counter, Y by
        // census of this scheduler's tasks still sitting at each processor.
        std::vector<Observation> observations;
        std::uint64_t pending_total = 0;
        for (const auto& [pid, proc] : procs_) {
            if (!proc.up) continue;
            Observation obs;
            obs.scheduler_id = sid;
            obs.processor_id = pid;
            obs.interval = closed;
            auto it = s.processed_now.find(pid);
            obs.processed = it != s.processed_now.end() ? it->second : 0;
            for (const TaskId tid : proc.queue) {
                if (tasks_.at(tid).owner == sid) ++obs.pending;
            }
            pending_total += obs.pending;
            record_observation(s.core, obs);
            observations.push_back(obs);
        }

        WireMessage report;
        report.kind = MsgKind::ObservationReport;
        report.from = sid;
        report.to = coordinator_;
        report.interval = closed;
        report.observations = std::move(observations);
        report.completed = s.completed_in_interval;
        report.backlog = s.core.output_queue.size() + pending_total;
        send(std::move(report), now);

        s.processed_now.clear();
        s.completed_in_interval = 0;

        if (!s.multicast_seen_this_period) {
            ++s.core.missed_multicasts;
            if (detect_coordinator_failure(s.core.missed_multicasts)) any_detection = true;
        }
        s.multicast_seen_this_period = false;
    }

    const double census = static_cast<double>(outstanding_at_boundary_ + admitted_in_interval_);
    const std::uint64_t routed = routed_in_interval_;
    outstanding_at_boundary_ = admitted_ - completed_;
    admitted_in_interval_ = 0;
    routed_in_interval_ = 0;

    auto coord_it = scheds_.find(coordinator_);
    if (coord_it != scheds_.end() && coord_it->second.up) {
        Collection col;
        col.interval = closed;
        const auto live = live_schedulers();
        col.expected.insert(live.begin(), live.end());
        col.census = census;
        col.routed = routed;
        collections_[closed] = std::move(col);
    }

    if (any_detection && !election_active_) begin_election(now);

    nlohmann::ordered_json payload;
    payload["interval"] = closed;
    payload["boundary"] = ev.boundary;
    payload["coordinator"] = coordinator_;
    payload["outstanding"] = admitted_ - completed_;
    payload["census"] = census;
    payload["routed"] = routed;
    record(now, EventKind::FeedbackInterval, std::move(payload));

    const double next_time = static_cast<double>(ev.boundary + 1) * scenario_.feedback_interval;
    if (next_time <= horizon_) {
        EngineEvent next;
        next.time = next_time;
        next.kind = EventKind::FeedbackInterval;
        next.boundary = ev.boundary + 1;
        schedule(next);
    }
}

void Engine::begin_election(double now) {
    election_active_ = true;
    ++election_round_;
    for (const SchedulerId sid : live_schedulers()) {
        WireMessage msg;
        msg.kind = MsgKind::Election;
        msg.from = sid;
        msg.round = election_round_;
        // With a uniform wire latency every candidate reports the same
        // responding time, so elections resolve on capacity score, then id.
        msg.responding_time = scenario_.message_latency;
        msg.capacity_score = scheds_.at(sid).core.capacity_score;
        multicast(msg, now);
    }
    EngineEvent timeout;
    timeout.time = now + scenario_.effective_election_timeout();
    timeout.kind = EventKind::ElectionTimeout;
    timeout.election_round = election_round_;
    schedule(timeout);
}

void Engine::on_election_timeout(const EngineEvent& ev) {
    if (!election_active_ || ev.election_round != election_round_) return;
    election_active_ = false;

    const auto live = live_schedulers();
    if (live.empty()) return;

    // Nodes that heard candidates all agree; a node with an empty inbox
    // (e.g. one that recovered mid-round) self-elects per the isolated-node
    // rule and then adopts the multicast winner.
    SchedulerId winner = 0;
    bool have_winner = false;
    std::size_t candidate_count = 0;
    for (const SchedulerId sid : live) {
        SchedState& s = scheds_.at(sid);
        if (s.election_inbox.empty()) continue;
        const SchedulerId local = elect(s.election_inbox, sid);
        if (!have_winner) {
            winner = local;
            candidate_count = s.election_inbox.size();
            have_winner = true;
        } else if (local != winner) {
            throw std::logic_error("election disagreement across schedulers");
        }
    }
    if (!have_winner) winner = elect({}, live.front());

    coordinator_ = winner;
    for (auto& [sid, s] : scheds_) {
        s.core.role = (sid == winner && s.up) ? SchedulerRole::Coordinator
                                              : SchedulerRole::Member;
        if (s.up) s.core.missed_multicasts = 0;
        s.election_inbox.clear();
    }
    collections_.clear(); // stale gatherings from the previous coordinator

    WireMessage ann;
    ann.kind = MsgKind::CoordinatorAnnouncement;
    ann.from = winner;
    ann.winner = winner;
    multicast(ann, ev.time);

    nlohmann::ordered_json payload;
    payload["round"] = ev.election_round;
    payload["winner"] = winner;
    payload["candidates"] = candidate_count;
    record(ev.time, EventKind::ElectionTimeout, std::move(payload));
}

void Engine::coordinator_compute(Collection& col, double now) {
    const int n = static_cast<int>(col.expected.size());
    const CapacityEstimation est =
        estimate_capacity(col.observations, std::max(1, n), scenario_.flags.rc_formula);
    const auto quota_total = static_cast<std::uint64_t>(std::llround(est.total_tasks));
    const std::vector<SchedulerId> members(col.expected.begin(), col.expected.end());
    const auto quotas = split_quota(quota_total, members);

    // Joint allocation: per-processor totals follow the relative capability
    // (an Up processor with no positive share keeps a small re-probe weight
    // so a recovered machine is not starved); scheduler rows then consume the
    // totals in id order. Column sums match the capability split exactly,
    // which keeps the cluster spread balanced even when quotas are tiny.
    const auto ups = up_processors();
    std::vector<double> weights(ups.size(), 0.0);
    double min_positive = 0.0;
    for (std::size_t i = 0; i < ups.size(); ++i) {
        auto it = est.table.find(ups[i]);
        const double rc = it != est.table.end() ? it->second.relative_capability : 0.0;
        weights[i] = rc > 0.0 ? rc : 0.0;
        if (rc > 0.0 && (min_positive == 0.0 || rc < min_positive)) min_positive = rc;
    }
    if (min_positive == 0.0) {
        std::fill(weights.begin(), weights.end(), 1.0);
    } else {
        for (double& w : weights) {
            if (w == 0.0) w = min_positive / 2.0;
        }
    }
    std::vector<std::uint64_t> per_processor = largest_remainder_split(quota_total, weights);
    std::map<SchedulerId, std::map<ProcessorId, std::uint64_t>> allocations;
    std::size_t column = 0;
    for (const SchedulerId sid : members) {
        std::uint64_t need = quotas.at(sid);
        auto& row = allocations[sid];
        while (need > 0 && column < ups.size()) {
            const std::uint64_t take = std::min(need, per_processor[column]);
            if (take > 0) {
                row[ups[column]] += take;
                per_processor[column] -= take;
                need -= take;
            }
            if (per_processor[column] == 0) ++column;
        }
    }

    CorrectionReport correction;
    bool correction_valid = false;
    if (col.census > 0.0 && col.routed > 0) {
        const double beta = standard_value(cluster_capacity_, col.census);
        std::vector<Variation> variations;
        for (const Collection::Monitor& m : col.monitors) {
            const double demand = static_cast<double>(m.completed + m.backlog);
            if (demand <= 0.0) continue; // nothing issued, nothing to compare
            const double measured = beta * static_cast<double>(m.completed) / demand;
            variations.push_back(classify_variation(measured, beta));
        }
        correction = capacity_correction(variations, cluster_capacity_,
                                         static_cast<double>(col.routed),
                                         scenario_.flags.corrected_semantics);
        correction.interval = col.interval;
        correction.beta = beta;
        cluster_capacity_ += correction.adjustment;
        correction_valid = true;
    }

    WireMessage cap;
    cap.kind = MsgKind::CapabilityMulticast;
    cap.from = coordinator_;
    cap.interval = col.interval;
    cap.table = est.table;
    cap.total_tasks = est.total_tasks;
    multicast(cap, now);

    WireMessage adjust;
    adjust.kind = MsgKind::AdjustLoadDistribution;
    adjust.from = coordinator_;
    adjust.interval = col.interval;
    adjust.quotas = quotas;
    adjust.allocations = std::move(allocations);
    adjust.correction = correction;
    adjust.correction_valid = correction_valid;
    adjust.cluster_capacity = cluster_capacity_;
    adjust.total_requests = col.routed;
    adjust.census = col.census;
    multicast(adjust, now);
}

void Engine::on_message(const EngineEvent& ev) {
    const WireMessage& msg = *ev.msg;
    SchedState& target = scheds_.at(msg.to);

    nlohmann::ordered_json payload;
    payload["msg"] = msg_kind_name(msg.kind);
    payload["from"] = msg.from;
    payload["to"] = msg.to;
    payload["interval"] = msg.interval;
    if (!target.up) {
        payload["dropped"] = true;
        record(ev.time, EventKind::MessageDeliver, std::move(payload));
        return;
    }

    switch (msg.kind) {
    case MsgKind::Election: {
        ElectionMessage em;
        em.sender = msg.from;
        em.send_time = msg.send_time;
        em.responding_time = msg.responding_time;
        em.capacity_score = msg.capacity_score;
        target.election_inbox.push_back(em);
        payload["round"] = msg.round;
        break;
    }
    case MsgKind::CoordinatorAnnouncement:
        payload["winner"] = msg.winner;
        break;
    case MsgKind::ObservationReport: {
        payload["completed"] = msg.completed;
        payload["backlog"] = msg.backlog;
        if (msg.to != coordinator_ || target.core.role != SchedulerRole::Coordinator) {
            payload["ignored"] = true;
            break;
        }
        auto it = collections_.find(msg.interval);
        if (it == collections_.end()) {
            payload["ignored"] = true;
            break;
        }
        Collection& col = it->second;
        col.observations.insert(col.observations.end(), msg.observations.begin(),
                                msg.observations.end());
        col.monitors.push_back({msg.from, msg.completed, msg.backlog});
        col.received.insert(msg.from);
        bool complete = true;
        for (const SchedulerId sid : col.expected) {
            if (!col.received.count(sid)) {
                complete = false;
                break;
            }
        }
        if (complete) {
            Collection done = std::move(col);
            collections_.erase(it);
            coordinator_compute(done, ev.time);
        }
        break;
    }
    case MsgKind::CapabilityMulticast: {
        target.core.missed_multicasts = 0;
        target.multicast_seen_this_period = true;
        target.core.capability_table = msg.table;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& [pid, row] : msg.table) {
            rows.push_back({{"processor", pid},
                            {"ap", row.aggregated_processed},
                            {"pr", row.aggregated_pending},
                            {"er", row.estimated_requests},
                            {"ec", row.estimated_capability},
                            {"rc", row.relative_capability}});
        }
        payload["table"] = std::move(rows);
        payload["total_tasks"] = msg.total_tasks;
        break;
    }
    case MsgKind::AdjustLoadDistribution: {
        auto it = msg.quotas.find(msg.to);
        const std::uint64_t quota = it != msg.quotas.end() ? it->second : 0;
        if (quota > 0) {
            target.has_window = true;
            target.allocation = split_allocation(target, quota);
        } else {
            // A zero quota carries no capacity information; fall back to
            // uncapped dispatch rather than stalling the queue.
            target.has_window = false;
            target.allocation.clear();
        }
        request_dispatch(msg.to, ev.time);

        payload["quota"] = quota;
        payload["cc"] = msg.cluster_capacity;
        payload["census"] = msg.census;
        payload["tr"] = msg.total_requests;
        if (msg.correction_valid) {
            payload["beta"] = msg.correction.beta;
            payload["oc"] = msg.correction.over_capacity;
            payload["uc"] = msg.correction.under_capacity;
            payload["cd"] = msg.correction.capacity_deviation;
            payload["adjustment"] = msg.correction.adjustment;
        }
        break;
    }
    }
    record(ev.time, EventKind::MessageDeliver, std::move(payload));
}

void Engine::reclaim_to_handler(const std::vector<TaskId>& ids) {
    for (const TaskId tid : reclaim(ids)) {
        TaskRuntime& rt = tasks_.at(tid);
        rt.loc = TaskRuntime::Loc::Handler;
        rt.owner = 0;
        rt.processor = 0;
        handler_queue_.push_back(tid);
    }
}

void Engine::on_fault(const EngineEvent& ev) {
    const FaultSpec& f = faults_sorted_.at(ev.fault_index);
    nlohmann::ordered_json payload;
    payload["target"] =
        f.target_kind == FaultSpec::TargetKind::Scheduler ? "scheduler" : "processor";
    payload["id"] = f.target;
    payload["action"] = f.action == FaultSpec::Action::Crash ? "crash" : "recover";

    if (f.target_kind == FaultSpec::TargetKind::Scheduler) {
        SchedState& s = scheds_.at(f.target);
        if (f.action == FaultSpec::Action::Crash) {
            if (!s.up) {
                payload["applied"] = false;
                record(ev.time, EventKind::Fault, std::move(payload));
                return;
            }
            s.up = false;
            const std::vector<TaskId> queued = s.core.output_queue;
            // Crash-stop: the node loses all protocol state and rejoins empty.
            s.core.output_queue.clear();
            s.core.role = SchedulerRole::Member;
            s.core.observations.clear();
            s.core.capability_table.clear();
            s.core.missed_multicasts = 0;
            s.has_window = false;
            s.allocation.clear();
            s.processed_now.clear();
            s.completed_in_interval = 0;
            s.multicast_seen_this_period = false;
            s.election_inbox.clear();
            if (f.target == coordinator_) collections_.clear();

            reclaim_to_handler(queued);
            payload["applied"] = true;
            payload["reclaimed"] = queued;
            payload["rerouted"] = handler_dispatch(ev.time);
        } else {
            if (s.up) {
                payload["applied"] = false;
                record(ev.time, EventKind::Fault, std::move(payload));
                return;
            }
            s.up = true; // rejoins empty and relearns from the next multicast
            payload["applied"] = true;
            payload["rerouted"] = handler_dispatch(ev.time);
        }
    } else {
        ProcState& p = procs_.at(f.target);
        if (f.action == FaultSpec::Action::Crash) {
            if (!p.up) {
                payload["applied"] = false;
                record(ev.time, EventKind::Fault, std::move(payload));
                return;
            }
            p.up = false;
            ++p.epoch; // voids the pending completion; in-flight work is lost
            const std::vector<TaskId> queued(p.queue.begin(), p.queue.end());
            p.queue.clear();
            reclaim_to_handler(queued);
            payload["applied"] = true;
            payload["reclaimed"] = queued;
            payload["rerouted"] = handler_dispatch(ev.time);
        } else {
            if (p.up) {
                payload["applied"] = false;
                record(ev.time, EventKind::Fault, std::move(payload));
                return;
            }
            p.up = true;
            payload["applied"] = true;
            // Nudge every live scheduler so queued work can reach the
            // recovered machine without waiting for the next multicast.
            for (const SchedulerId sid : live_schedulers()) {
                request_dispatch(sid, ev.time);
            }
        }
    }
    record(ev.time, EventKind::Fault, std::move(payload));
}

} // namespace

EventTrace run(const Scenario& scenario) {
    Engine engine(scenario);
    return engine.run();
}

} // namespace mlb
