#include "mlb/admission.hpp"

#include "mlb/placement.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mlb {

std::vector<Task> deduplicate(const std::vector<Task>& batch) {
    std::vector<Task> out;
    out.reserve(batch.size());
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    for (const Task& t : batch) {
        if (seen.insert({t.user_id, t.payload_fingerprint}).second) {
            out.push_back(t);
        }
    }
    return out;
}

std::optional<CheapestEstimate> cheapest_estimate(const Task& task,
                                                  const std::vector<Processor>& processors) {
    std::optional<CheapestEstimate> best;
    for (const Processor& p : processors) {
        if (p.status != ProcessorStatus::Up) continue;
        const double cost = processing_cost(task.size, p.speed, p.price);
        const double rt = response_time(task.size, p.bandwidth, p.speed);
        if (!best) {
            best = CheapestEstimate{cost, rt};
        } else {
            best->price_cost = std::min(best->price_cost, cost);
            best->response_time = std::min(best->response_time, rt);
        }
    }
    return best;
}

AdmissionDecision sla_admit(const Task& task, const CheapestEstimate& estimate,
                            const SlaPolicy& policy) {
    if (task.cost < (1.0 + policy.cost_margin) * estimate.price_cost) {
        return AdmissionDecision::RejectedCost;
    }
    if (estimate.response_time > policy.time_margin * task.deadline_hint) {
        return AdmissionDecision::RejectedTime;
    }
    return AdmissionDecision::Accepted;
}

RoundRobinResult dispatch_round_robin(const std::vector<TaskId>& accepted,
                                      const std::vector<SchedulerId>& live_schedulers,
                                      std::size_t cursor) {
    if (live_schedulers.empty()) {
        throw std::invalid_argument("no scheduler available");
    }
    RoundRobinResult result;
    result.assignments.reserve(accepted.size());
    std::size_t pos = cursor % live_schedulers.size();
    for (TaskId task : accepted) {
        result.assignments.emplace_back(task, live_schedulers[pos]);
        pos = (pos + 1) % live_schedulers.size();
    }
    result.new_cursor = (cursor + accepted.size()) % live_schedulers.size();
    return result;
}

std::vector<TaskId> reclaim(const std::vector<TaskId>& dead_scheduler_queue) {
    return dead_scheduler_queue;
}

} // namespace mlb
