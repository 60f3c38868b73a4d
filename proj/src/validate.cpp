#include "mlb/validate.hpp"

#include <cmath>
#include <set>
#include <string>

namespace mlb {

namespace {

std::string num(std::uint64_t v) { return std::to_string(v); }

void check_distribution(const Distribution& d, const std::string& entity, bool must_be_positive,
                        std::vector<Violation>& out) {
    if (!std::isfinite(d.a) || !std::isfinite(d.b)) {
        out.push_back({entity, "distribution parameters must be finite"});
        return;
    }
    switch (d.kind) {
    case Distribution::Kind::Constant:
        if (must_be_positive ? d.a <= 0.0 : d.a < 0.0) {
            out.push_back({entity, must_be_positive ? "constant must be > 0"
                                                    : "constant must be >= 0"});
        }
        break;
    case Distribution::Kind::Uniform:
        if (d.a > d.b) out.push_back({entity, "uniform bounds must satisfy lo <= hi"});
        if (must_be_positive ? d.a <= 0.0 : d.a < 0.0) {
            out.push_back({entity, must_be_positive ? "uniform lower bound must be > 0"
                                                    : "uniform lower bound must be >= 0"});
        }
        break;
    case Distribution::Kind::Exponential:
        if (must_be_positive ? d.a <= 0.0 : d.a < 0.0) {
            out.push_back({entity, "exponential mean must be positive"});
        }
        break;
    }
}

} // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
    std::vector<Violation> out;

    std::set<ProcessorId> processor_ids;
    for (const ProcessorSpec& p : s.processors) {
        const std::string entity = "processor " + num(p.id);
        if (!processor_ids.insert(p.id).second) {
            out.push_back({entity, "duplicate processor id"});
        }
        if (p.speed <= 0.0) out.push_back({entity, "speed must be > 0"});
        if (p.bandwidth <= 0.0) out.push_back({entity, "bandwidth must be > 0"});
        if (p.energy_rate < 0.0) out.push_back({entity, "energy_rate must be >= 0"});
    }
    if (s.processors.empty()) {
        out.push_back({"processors", "at least one processor is required"});
    }

    if (s.n_schedulers < 1) {
        out.push_back({"schedulers", "at least one scheduler is required"});
    }
    if (s.scheduler_capacity_scores.size() > s.n_schedulers) {
        out.push_back({"scheduler_capacity_scores", "more scores than schedulers"});
    }

    if (!(s.feedback_interval > 0.0)) {
        out.push_back({"feedback_interval", "must be > 0"});
    }
    if (s.message_latency < 0.0) {
        out.push_back({"message_latency", "must be >= 0"});
    }
    if (s.election_timeout < 0.0) {
        out.push_back({"election_timeout", "must be >= 0"});
    }
    if (!(s.sla.cost_margin >= 0.0) || !std::isfinite(s.sla.cost_margin)) {
        out.push_back({"sla.cost_margin", "must be finite and >= 0"});
    }
    if (!(s.sla.time_margin >= 0.0) || !std::isfinite(s.sla.time_margin)) {
        out.push_back({"sla.time_margin", "must be finite and >= 0"});
    }

    const Workload& w = s.workload;
    switch (w.kind) {
    case Workload::Kind::Explicit: {
        std::set<TaskId> ids;
        for (const Task& t : w.tasks) {
            const std::string entity = "task " + num(t.id);
            if (!ids.insert(t.id).second) out.push_back({entity, "duplicate task id"});
            if (t.size <= 0.0) out.push_back({entity, "size must be > 0"});
            if (t.cost < 0.0) out.push_back({entity, "cost must be >= 0"});
            if (t.deadline_hint <= 0.0) out.push_back({entity, "deadline must be > 0"});
            if (t.arrival_time < 0.0) out.push_back({entity, "arrival must be >= 0"});
        }
        break;
    }
    case Workload::Kind::Poisson:
        if (w.rate <= 0.0 && w.count > 0) {
            out.push_back({"workload", "poisson rate must be > 0"});
        }
        break;
    case Workload::Kind::Batches:
        if (w.batch_size == 0 && w.batch_count > 0) {
            out.push_back({"workload", "batch_size must be > 0"});
        }
        if (w.batch_offset < 0.0) {
            out.push_back({"workload", "batch_offset must be >= 0"});
        }
        break;
    }
    if (w.kind != Workload::Kind::Explicit) {
        check_distribution(w.size, "workload.size", true, out);
        check_distribution(w.cost, "workload.cost", false, out);
        check_distribution(w.deadline, "workload.deadline", true, out);
        if (w.n_users == 0) out.push_back({"workload", "users must be >= 1"});
    }

    // Referential integrity only; a crash on an already-down target is a
    // runtime no-op, not a validation failure.
    for (std::size_t i = 0; i < s.fault_schedule.size(); ++i) {
        const FaultSpec& f = s.fault_schedule[i];
        const std::string entity = "fault[" + num(i) + "]";
        if (f.time < 0.0) out.push_back({entity, "time must be >= 0"});
        if (f.target_kind == FaultSpec::TargetKind::Scheduler) {
            if (f.target < 1 || f.target > s.n_schedulers) {
                out.push_back({entity, "unknown scheduler id " + num(f.target)});
            }
        } else if (!processor_ids.count(f.target)) {
            out.push_back({entity, "unknown processor id " + num(f.target)});
        }
    }

    if (s.cluster_capacity < 0.0) out.push_back({"cluster_capacity", "must be >= 0"});
    if (s.horizon < 0.0) out.push_back({"horizon", "must be >= 0"});
    if (s.cost_model.server_cost_per_second < 0.0) {
        out.push_back({"cost_model.server_cost_per_second", "must be >= 0"});
    }
    if (s.cost_model.sla_penalty < 0.0) {
        out.push_back({"cost_model.sla_penalty", "must be >= 0"});
    }
    return out;
}

} // namespace mlb
