#pragma once

#include "mlb/admission.hpp"
#include "mlb/coordination.hpp"
#include "mlb/rng.hpp"
#include "mlb/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlb {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Distribution {
    enum class Kind { Constant, Uniform, Exponential };
    Kind kind = Kind::Constant;
    double a = 0.0; // constant value, uniform lower bound, or exponential mean
    double b = 0.0; // uniform upper bound

    double sample(SplitMix64& rng) const;
    double mean() const;
};

struct ProcessorSpec {
    ProcessorId id = 0;
    double speed = 0.0;
    double bandwidth = 0.0;
    double price = 0.0;
    double energy_rate = 0.0;
};

/// Task stream description. `Explicit` lists tasks verbatim; `Poisson` draws
/// exponential inter-arrival gaps at `rate`; `Batches` drops `batch_size`
/// tasks at `batch_offset` seconds past each feedback-interval start.
struct Workload {
    enum class Kind { Explicit, Poisson, Batches };
    Kind kind = Kind::Explicit;

    std::vector<Task> tasks; // Explicit

    double rate = 0.0; // Poisson arrivals per second
    std::uint64_t count = 0;
    double start_time = 0.0;

    std::uint64_t batch_size = 0; // Batches
    std::uint64_t batch_count = 0;
    double batch_offset = 0.0;

    std::uint32_t n_users = 1;
    Distribution size{Distribution::Kind::Constant, 1.0, 0.0};
    Distribution cost{Distribution::Kind::Constant, 0.0, 0.0};
    Distribution deadline{Distribution::Kind::Constant, 1.0, 0.0};
};

struct FaultSpec {
    enum class TargetKind { Scheduler, Processor };
    enum class Action { Crash, Recover };
    double time = 0.0;
    TargetKind target_kind = TargetKind::Scheduler;
    std::uint32_t target = 0;
    Action action = Action::Crash;
};

struct CostModel {
    double server_cost_per_second = 0.0;
    double sla_penalty = 0.0; // per deadline-missing completion
};

struct ScenarioFlags {
    RcFormula rc_formula = RcFormula::Printed;
    bool corrected_semantics = false;
};

struct Scenario {
    std::vector<ProcessorSpec> processors;
    std::uint32_t n_schedulers = 1;
    std::vector<double> scheduler_capacity_scores; // optional; padded with zeros
    Workload workload;
    SlaPolicy sla;
    double feedback_interval = 1.0;
    double message_latency = 0.0;
    double election_timeout = 0.0; // 0 = feedback_interval / 2
    std::vector<FaultSpec> fault_schedule;
    std::uint64_t seed = 0;
    ScenarioFlags flags;
    CostModel cost_model;
    double cluster_capacity = 0.0; // 0 = derived from the fleet
    double horizon = 0.0;          // 0 = derived from the schedule

    double effective_election_timeout() const {
        return election_timeout > 0.0 ? election_timeout : feedback_interval / 2.0;
    }
};

Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario_file(const std::string& path);
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);

/// Expands the workload into concrete tasks, ordered by arrival time. Uses a
/// SplitMix64 stream derived from the scenario seed, so the same scenario
/// always yields the same task list.
std::vector<Task> materialize_tasks(const Scenario& scenario);

/// Initial cluster capacity: per Up processor, interval_length * speed / mean
/// task size, summed. An explicit scenario value overrides the derivation.
double initial_cluster_capacity(const Scenario& scenario);

/// Default horizon: 10x the last scheduled event (arrival or fault), floored
/// at ten feedback intervals.
double effective_horizon(const Scenario& scenario, const std::vector<Task>& tasks);

} // namespace mlb
