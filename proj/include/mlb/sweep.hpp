#pragma once

#include "mlb/metrics.hpp"
#include "mlb/scenario.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mlb {

/// One override axis: a dot-path into the scenario document and the values it
/// takes across the grid. Labels name the values in the combined table and
/// default to the value's JSON rendering.
struct SweepAxis {
    std::string field;
    std::vector<nlohmann::json> values;
    std::vector<std::string> labels;
};

struct SweepSpec {
    nlohmann::json base;
    std::vector<SweepAxis> axes;
};

struct SweepPoint {
    std::size_t index = 0;
    std::vector<std::string> labels; // one per axis
    nlohmann::json scenario_doc;     // base with overrides applied
    bool failed = false;
    std::string error;
    EventTrace trace;
    MetricsReport report;
};

SweepSpec sweep_from_json(const nlohmann::json& doc, const std::string& base_dir);

/// Sets `value` at `path` ("a.b.c") inside the scenario document. The leading
/// segment must name a scenario field.
void apply_override(nlohmann::json& doc, const std::string& path, const nlohmann::json& value);

/// Cartesian product of the axes, first axis slowest. Failed points carry
/// their diagnostic and the sweep continues.
std::vector<SweepPoint> run_sweep(const SweepSpec& spec);

/// One row per grid point, keyed by the axis labels, with the headline
/// metrics of each run.
std::string combined_csv(const SweepSpec& spec, const std::vector<SweepPoint>& points);

} // namespace mlb
