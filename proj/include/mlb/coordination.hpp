#pragma once

#include "mlb/types.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace mlb {

struct ElectionMessage {
    SchedulerId sender = 0;
    double send_time = 0.0;
    double responding_time = 0.0; // sender's measured response latency this round
    double capacity_score = 0.0;
};

/// Which relative-capability formula to apply: the printed one divides
/// estimated requests by the capability total; the normalized one divides
/// estimated capability by the capability total.
enum class RcFormula { Printed, Normalized };

struct CapacityEstimation {
    std::map<ProcessorId, CapabilityEstimate> table;
    double total_tasks = 0.0;         // T_t: sum of estimated requests
    double per_scheduler_quota = 0.0; // T_it = T_t / n, as printed (fractional)
};

enum class VariationKind { Success, Failure, Neither };

struct Variation {
    VariationKind kind = VariationKind::Neither;
    double magnitude = 0.0; // always >= 0
};

struct CorrectionReport {
    Interval interval = 0;
    double beta = 0.0;
    std::vector<double> success_variations;
    std::vector<double> failure_variations;
    double over_capacity = 0.0;      // OC: sum of success variations
    double under_capacity = 0.0;     // UC: sum of failure variations
    double capacity_deviation = 0.0; // CD = |OC - UC|
    double adjustment = 0.0;         // signed cluster-capacity delta
};

struct ClusterState {
    double cluster_capacity = 0.0; // CC, tasks servable per interval
    double total_tasks = 0.0;      // T_t, handler census for the interval
    double total_requests = 0.0;   // TR_t, tasks routed to schedulers in the interval
};

/// Winner over the received candidate messages; with none received the caller
/// elects itself. Greatest responding_time wins, then highest capacity score,
/// then lowest scheduler id. Deterministic: identical candidate sets produce
/// identical winners everywhere.
SchedulerId elect(const std::vector<ElectionMessage>& candidates, SchedulerId self);

/// Stores the observation, overwriting any earlier record for the same
/// (processor, interval).
void record_observation(Scheduler& scheduler, const Observation& obs);

/// Aggregates one interval's observations into per-processor capability
/// estimates and the next interval's task totals. n_schedulers must be >= 1.
CapacityEstimation estimate_capacity(const std::vector<Observation>& observations,
                                     int n_schedulers, RcFormula formula);

/// Floor-plus-remainder integer split of the task total over schedulers;
/// the remainder goes one each to the lowest ids. Conserves the total.
std::map<SchedulerId, std::uint64_t> split_quota(std::uint64_t total,
                                                 const std::vector<SchedulerId>& schedulers);

/// Largest-remainder apportionment of `total` over non-negative weights.
/// All-zero weights split evenly. Ties in fractional part go to the lowest index.
std::vector<std::uint64_t> largest_remainder_split(std::uint64_t total,
                                                   const std::vector<double>& weights);

/// True once three consecutive coordinator intervals passed with no capability
/// multicast received.
bool detect_coordinator_failure(int missed_multicasts);

/// beta = cluster_capacity / total_tasks. Throws std::domain_error when
/// total_tasks <= 0 (no demand; the correction loop skips the interval).
double standard_value(double cluster_capacity, double total_tasks);

/// Above beta is a success variation, below is a failure variation, equal is
/// neither; magnitudes are relative to beta and non-negative.
Variation classify_variation(double measured_throughput, double beta);

/// Sums the variations into over/under capacity, takes their gap as the
/// capacity deviation, and derives the signed capacity adjustment. With the
/// default semantics a dominant over-capacity increases the cluster capacity
/// by (CC/TR)*CD and a dominant under-capacity reduces it by CD*(CC/(TR+CD));
/// corrected_semantics swaps the two branches. Throws std::domain_error when
/// total_requests <= 0.
CorrectionReport capacity_correction(const std::vector<Variation>& variations,
                                     double cluster_capacity, double total_requests,
                                     bool corrected_semantics);

} // namespace mlb
