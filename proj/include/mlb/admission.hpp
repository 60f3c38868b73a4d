#pragma once

#include "mlb/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace mlb {

/// Admission gate parameters. cost_margin is the minimum relative headroom of
/// the offered cost over the provider price; time_margin is the maximum
/// allowed ratio of estimated response time to the task's deadline hint.
struct SlaPolicy {
    double cost_margin = 0.0;
    double time_margin = 1.0;
};

enum class AdmissionDecision { Accepted, RejectedCost, RejectedTime };

struct AdmissionOutcome {
    TaskId task_id = 0;
    AdmissionDecision decision = AdmissionDecision::Accepted;
    std::optional<SchedulerId> assigned_scheduler; // present iff Accepted
};

/// Most favorable cost and time over the live fleet, evaluated independently
/// per criterion (the cheapest processor for cost need not be the fastest).
struct CheapestEstimate {
    double price_cost = 0.0;
    double response_time = 0.0;
};

/// Drops repeated (user_id, payload_fingerprint) pairs, keeping the first
/// occurrence and the relative order of survivors.
std::vector<Task> deduplicate(const std::vector<Task>& batch);

/// Cheapest processing-cost and response-time estimate over Up processors.
/// Returns nullopt when no processor is live (no capacity estimate available).
std::optional<CheapestEstimate> cheapest_estimate(const Task& task,
                                                  const std::vector<Processor>& processors);

/// Accepted iff cost >= (1 + cost_margin) * price_cost and
/// response_time <= time_margin * deadline_hint; both boundaries inclusive.
/// The cost branch is checked first, so it names the rejection on a double miss.
AdmissionDecision sla_admit(const Task& task, const CheapestEstimate& estimate,
                            const SlaPolicy& policy);

struct RoundRobinResult {
    std::vector<std::pair<TaskId, SchedulerId>> assignments;
    std::size_t new_cursor = 0;
};

/// Cyclic assignment starting at cursor; per-scheduler counts differ by at
/// most one. Throws std::invalid_argument when live_schedulers is empty.
RoundRobinResult dispatch_round_robin(const std::vector<TaskId>& accepted,
                                      const std::vector<SchedulerId>& live_schedulers,
                                      std::size_t cursor);

/// Tasks queued on a dead scheduler re-enter the handler in original order.
std::vector<TaskId> reclaim(const std::vector<TaskId>& dead_scheduler_queue);

} // namespace mlb
