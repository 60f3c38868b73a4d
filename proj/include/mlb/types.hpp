#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mlb {

using TaskId = std::uint64_t;
using SchedulerId = std::uint32_t;
using ProcessorId = std::uint32_t;
using Interval = std::int64_t;

/// A user request: the unit of work flowing through the system.
struct Task {
    TaskId id = 0;
    std::uint64_t user_id = 0;
    /// Content hash used for duplicate detection; identity is (user_id, fingerprint).
    std::uint64_t payload_fingerprint = 0;
    double size = 0.0;          // work units, > 0
    double cost = 0.0;          // currency offered by the user, >= 0
    double arrival_time = 0.0;  // simulation seconds
    double deadline_hint = 0.0; // expected response time, > 0
};

enum class ProcessorStatus { Up, Down };

/// A backend server modeled as a rate + FIFO queue.
struct Processor {
    ProcessorId id = 0;
    double speed = 0.0;       // work units per second, > 0
    double bandwidth = 0.0;   // work units per second transferable, > 0
    double price = 0.0;       // currency per second of processing
    double energy_rate = 0.0; // energy units per second while busy, >= 0
    ProcessorStatus status = ProcessorStatus::Up;
    std::vector<TaskId> queue; // empty whenever status == Down
};

enum class SchedulerRole { Coordinator, Member };

/// One scheduler's per-interval view of one processor.
struct Observation {
    SchedulerId scheduler_id = 0;
    ProcessorId processor_id = 0;
    Interval interval = 0;
    std::uint64_t processed = 0; // X_ijt: completions of this scheduler's tasks seen at the processor
    std::uint64_t pending = 0;   // Y_ijt: this scheduler's tasks still queued there at interval end
};

/// Per-processor per-interval output of the capacity estimation step.
struct CapabilityEstimate {
    ProcessorId processor_id = 0;
    Interval interval = 0;
    double aggregated_processed = 0.0; // AP_jt
    double aggregated_pending = 0.0;   // PR_jt
    double estimated_requests = 0.0;   // ER_jt
    double estimated_capability = 0.0; // EC_jt = ER_jt / max(1, PR_jt)
    double relative_capability = 0.0;  // RC_jt
};

/// Load balancer state as seen by the protocol layer.
struct Scheduler {
    SchedulerId id = 0;
    SchedulerRole role = SchedulerRole::Member;
    std::vector<TaskId> output_queue;
    std::map<std::pair<ProcessorId, Interval>, Observation> observations;
    std::map<ProcessorId, CapabilityEstimate> capability_table;
    // Consecutive coordinator intervals with no capability message received.
    // Resets to 0 on every received capability multicast.
    int missed_multicasts = 0;
    // Election tie-breaker only; a configured scalar, not a measured quantity.
    double capacity_score = 0.0;
};

} // namespace mlb
