#pragma once

#include "mlb/types.hpp"

#include <map>
#include <set>
#include <utility>

namespace mlb {

/// The three per-(task, processor) objectives: lower response time and energy
/// are better, higher profit is better.
struct ObjectiveTriple {
    double response_time = 0.0;
    double energy = 0.0;
    double profit = 0.0;
};

struct PlacementResult {
    std::map<TaskId, ProcessorId> assignment;
    std::map<std::pair<TaskId, ProcessorId>, int> rank_sums;
};

/// Transmission time plus processing time: size/bandwidth + size/speed.
double response_time(double size, double bandwidth, double speed);

/// Processing time priced at the processor rate: (size/speed) * price.
double processing_cost(double size, double speed, double price);

/// Processing cost minus the user-offered task cost, as written; negative
/// values are permitted.
double profit(double size, double speed, double price, double task_cost);

/// Busy-time energy model: (size/speed) * energy_rate.
double energy(double size, double speed, double energy_rate);

/// Per task, each criterion is ranked over the live processors with standard
/// competition ranking (ties share the better rank); the processor with the
/// minimum rank sum wins. Rank-sum ties break by lowest response time, then
/// lowest processor id. Throws std::invalid_argument when live is empty.
PlacementResult rank_assign(const std::map<std::pair<TaskId, ProcessorId>, ObjectiveTriple>& triples,
                            const std::set<ProcessorId>& live);

} // namespace mlb
