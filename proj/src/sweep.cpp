#include "mlb/sweep.hpp"

#include "mlb/simkernel.hpp"
#include "mlb/validate.hpp"

#include <cstdio>
#include <fstream>

namespace mlb {

namespace {

const char* const kScenarioFields[] = {
    "processors",     "schedulers", "scheduler_capacity_scores",
    "workload",       "sla",        "feedback_interval",
    "message_latency", "election_timeout", "fault_schedule",
    "seed",           "flags",      "cost_model",
    "cluster_capacity", "horizon",
};

bool is_scenario_field(const std::string& name) {
    for (const char* field : kScenarioFields) {
        if (name == field) return true;
    }
    return false;
}

std::string default_label(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_primitive()) return value.dump();
    return "<" + std::string(value.type_name()) + ":" + std::to_string(value.size()) + ">";
}

std::string fmt2(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt6(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

SweepSpec sweep_from_json(const nlohmann::json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw ScenarioError("sweep document must be a JSON object");
    SweepSpec spec;
    if (doc.contains("base_file")) {
        const std::string rel = doc["base_file"].get<std::string>();
        const std::string path =
            (!rel.empty() && rel.front() == '/') || base_dir.empty() ? rel : base_dir + "/" + rel;
        std::ifstream in(path);
        if (!in) throw ScenarioError("cannot open base scenario: " + path);
        in >> spec.base;
    } else if (doc.contains("base")) {
        spec.base = doc["base"];
    } else {
        throw ScenarioError("sweep needs a base or base_file");
    }

    for (const auto& axis_doc : doc.value("axes", nlohmann::json::array())) {
        SweepAxis axis;
        axis.field = axis_doc.value("field", "");
        if (axis.field.empty()) throw ScenarioError("sweep axis needs a field");
        const std::string head = axis.field.substr(0, axis.field.find('.'));
        if (!is_scenario_field(head)) {
            throw ScenarioError("sweep axis does not name a scenario field: " + axis.field);
        }
        if (!axis_doc.contains("values") || !axis_doc["values"].is_array() ||
            axis_doc["values"].empty()) {
            throw ScenarioError("sweep axis needs a non-empty values array: " + axis.field);
        }
        for (const auto& v : axis_doc["values"]) axis.values.push_back(v);
        if (axis_doc.contains("labels")) {
            for (const auto& l : axis_doc["labels"]) {
                axis.labels.push_back(l.get<std::string>());
            }
            if (axis.labels.size() != axis.values.size()) {
                throw ScenarioError("sweep axis labels must match values: " + axis.field);
            }
        } else {
            for (const auto& v : axis.values) axis.labels.push_back(default_label(v));
        }
        spec.axes.push_back(std::move(axis));
    }
    if (spec.axes.empty()) throw ScenarioError("sweep needs at least one axis");
    return spec;
}

void apply_override(nlohmann::json& doc, const std::string& path, const nlohmann::json& value) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        parts.push_back(path.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (parts.empty() || !is_scenario_field(parts.front())) {
        throw ScenarioError("override does not name a scenario field: " + path);
    }
    nlohmann::json* node = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        node = &(*node)[parts[i]];
        if (!node->is_object() && !node->is_null()) {
            throw ScenarioError("override path crosses a non-object: " + path);
        }
    }
    (*node)[parts.back()] = value;
}

std::vector<SweepPoint> run_sweep(const SweepSpec& spec) {
    std::size_t total = 1;
    for (const SweepAxis& axis : spec.axes) total *= axis.values.size();

    std::vector<SweepPoint> points;
    points.reserve(total);
    for (std::size_t index = 0; index < total; ++index) {
        SweepPoint point;
        point.index = index;
        point.scenario_doc = spec.base;

        // First axis slowest.
        std::size_t rem = index;
        std::vector<std::size_t> choice(spec.axes.size(), 0);
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            choice[a] = rem % spec.axes[a].values.size();
            rem /= spec.axes[a].values.size();
        }
        try {
            for (std::size_t a = 0; a < spec.axes.size(); ++a) {
                const SweepAxis& axis = spec.axes[a];
                point.labels.push_back(axis.labels[choice[a]]);
                apply_override(point.scenario_doc, axis.field, axis.values[choice[a]]);
            }
            const Scenario scenario = scenario_from_json(point.scenario_doc);
            const auto violations = validate_scenario(scenario);
            if (!violations.empty()) {
                throw ScenarioError("validation: " + violations.front().entity + ": " +
                                    violations.front().message);
            }
            point.trace = run(scenario);
            point.report = build_report(point.trace, scenario);
        } catch (const std::exception& e) {
            point.failed = true;
            point.error = e.what();
        }
        points.push_back(std::move(point));
    }
    return points;
}

std::string combined_csv(const SweepSpec& spec, const std::vector<SweepPoint>& points) {
    std::string out = "point";
    for (const SweepAxis& axis : spec.axes) out += ',' + axis.field;
    out += ",status,mean_cd_percent,fault_percent,mean_response,p95_response,net_benefit,"
           "admitted,completed,violations,truncated\n";
    for (const SweepPoint& p : points) {
        out += std::to_string(p.index);
        for (const std::string& label : p.labels) out += ',' + label;
        if (p.failed) {
            out += ",error,,,,,,,,,\n";
            continue;
        }
        const MetricsSummary& s = p.report.summary;
        out += ",ok," + fmt2(s.mean_cd_percent) + ',' + fmt2(s.fault_percent) + ',' +
               fmt6(s.response.mean) + ',' + fmt6(s.response.p95) + ',' +
               fmt6(s.cost.net_benefit) + ',' + std::to_string(s.admitted) + ',' +
               std::to_string(s.completed) + ',' + std::to_string(s.violations) + ',' +
               (s.truncated ? "1" : "0") + '\n';
    }
    return out;
}

} // namespace mlb
