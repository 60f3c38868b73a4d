#pragma once

#include "mlb/scenario.hpp"

#include <vector>

namespace mlb::testing {

inline ProcessorSpec proc(ProcessorId id, double speed = 100, double bandwidth = 100,
                          double price = 0.02, double energy_rate = 1.0) {
    ProcessorSpec p;
    p.id = id;
    p.speed = speed;
    p.bandwidth = bandwidth;
    p.price = price;
    p.energy_rate = energy_rate;
    return p;
}

inline Task task(TaskId id, double arrival, double size = 100, double cost = 1.0,
                 double deadline = 50) {
    Task t;
    t.id = id;
    t.user_id = 1;
    t.payload_fingerprint = id;
    t.size = size;
    t.cost = cost;
    t.arrival_time = arrival;
    t.deadline_hint = deadline;
    return t;
}

/// n_procs identical processors, n schedulers, explicit task list, generous
/// margins. Task size 100 at speed/bandwidth 100 gives a 2 s service time.
inline Scenario base_scenario(std::uint32_t n_schedulers, int n_procs,
                              std::vector<Task> tasks) {
    Scenario s;
    for (int i = 1; i <= n_procs; ++i) s.processors.push_back(proc(static_cast<ProcessorId>(i)));
    s.n_schedulers = n_schedulers;
    s.workload.kind = Workload::Kind::Explicit;
    s.workload.tasks = std::move(tasks);
    s.sla.cost_margin = 0.0;
    s.sla.time_margin = 1.0;
    s.feedback_interval = 5.0;
    s.message_latency = 0.05;
    s.seed = 1;
    return s;
}

/// Per-interval batch workload used by the sweep-style scenarios: batch_size
/// tasks land shortly after each interval start.
inline Scenario batch_scenario(std::uint32_t n_schedulers, int n_procs,
                               std::uint64_t batch_size, std::uint64_t batch_count) {
    Scenario s = base_scenario(n_schedulers, n_procs, {});
    s.workload.kind = Workload::Kind::Batches;
    s.workload.batch_size = batch_size;
    s.workload.batch_count = batch_count;
    s.workload.batch_offset = 0.2;
    s.workload.size = {Distribution::Kind::Constant, 100.0, 0.0};
    s.workload.cost = {Distribution::Kind::Constant, 1.0, 0.0};
    s.workload.deadline = {Distribution::Kind::Constant, 50.0, 0.0};
    return s;
}

} // namespace mlb::testing
