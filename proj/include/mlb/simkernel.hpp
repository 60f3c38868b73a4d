#pragma once

#include "mlb/event.hpp"
#include "mlb/scenario.hpp"

namespace mlb {

/// Executes the scenario until the workload is exhausted and all queues have
/// drained, or until the horizon cuts it short (flagged on the trace). The
/// trace is a pure function of the scenario document: same scenario and seed,
/// bit-identical trace.
EventTrace run(const Scenario& scenario);

} // namespace mlb
