#pragma once

#include "mlb/scenario.hpp"

#include <string>
#include <vector>

namespace mlb {

/// One broken invariant; violations are data, not failures.
struct Violation {
    std::string entity;  // e.g. "processor 3", "fault[2]"
    std::string message;
};

/// Empty iff every type invariant holds for every entity and the fault
/// schedule only references declared ids.
std::vector<Violation> validate_scenario(const Scenario& scenario);

} // namespace mlb
