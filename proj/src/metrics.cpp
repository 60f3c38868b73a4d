#include "mlb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mlb {

namespace {

std::string fmt2(double v) {
    if (v == 0.0) v = 0.0; // normalize negative zero
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

// Nearest-rank percentile over a sorted sample.
double percentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    if (rank == 0) rank = 1;
    return sorted[rank - 1];
}

} // namespace

double capacity_deviation_percent(const CorrectionReport& report, double cluster_capacity) {
    return 100.0 * std::fabs(report.adjustment) / cluster_capacity;
}

double fault_percentage(const EventTrace& trace) {
    std::uint64_t admitted = 0;
    std::uint64_t completed = 0;
    for (const TraceRecord& rec : trace.records) {
        if (rec.kind == EventKind::TaskArrival &&
            rec.payload.value("decision", "") == "accepted") {
            ++admitted;
        } else if (rec.kind == EventKind::TaskComplete) {
            ++completed;
        }
    }
    if (admitted == 0) return 0.0;
    return 100.0 * static_cast<double>(admitted - completed) / static_cast<double>(admitted);
}

CostBenefit cost_benefit(const EventTrace& trace, const Scenario& scenario) {
    CostBenefit out;
    const double trace_end = trace.records.empty() ? 0.0 : trace.records.back().time;

    std::map<ProcessorId, std::vector<std::pair<double, bool>>> transitions;
    std::map<TaskId, double> cost_of;
    std::uint64_t violations = 0;
    for (const TraceRecord& rec : trace.records) {
        if (rec.kind == EventKind::TaskArrival) {
            cost_of[rec.payload.value("task", TaskId{0})] = rec.payload.value("cost", 0.0);
        } else if (rec.kind == EventKind::TaskComplete) {
            out.revenue += cost_of[rec.payload.value("task", TaskId{0})];
            if (rec.payload.value("violation", false)) ++violations;
        } else if (rec.kind == EventKind::Fault && rec.payload.value("applied", false) &&
                   rec.payload.value("target", "") == "processor") {
            const auto pid = rec.payload.value("id", ProcessorId{0});
            transitions[pid].emplace_back(rec.time, rec.payload.value("action", "") == "recover");
        }
    }

    for (const ProcessorSpec& spec : scenario.processors) {
        double up_seconds = 0.0;
        double mark = 0.0;
        bool up = true;
        for (const auto& [time, becomes_up] : transitions[spec.id]) {
            if (up && !becomes_up) {
                up_seconds += time - mark;
                up = false;
            } else if (!up && becomes_up) {
                mark = time;
                up = true;
            }
        }
        if (up) up_seconds += trace_end - mark;
        out.provider_cost += up_seconds * scenario.cost_model.server_cost_per_second;
    }
    out.penalty_cost = static_cast<double>(violations) * scenario.cost_model.sla_penalty;
    out.net_benefit = out.revenue - out.provider_cost - out.penalty_cost;
    return out;
}

MetricsReport build_report(const EventTrace& trace, const Scenario& scenario) {
    MetricsReport report;
    MetricsSummary& sum = report.summary;

    std::map<Interval, IntervalRow> rows;
    std::set<Interval> corrected;
    std::vector<double> responses;

    for (const TraceRecord& rec : trace.records) {
        switch (rec.kind) {
        case EventKind::TaskArrival: {
            ++sum.arrivals;
            const std::string decision = rec.payload.value("decision", "");
            if (decision == "accepted") ++sum.admitted;
            else if (decision == "duplicate") ++sum.duplicates;
            else if (decision == "rejected_cost") ++sum.rejected_cost;
            else if (decision == "rejected_time") ++sum.rejected_time;
            break;
        }
        case EventKind::TaskComplete:
            ++sum.completed;
            responses.push_back(rec.payload.value("response", 0.0));
            if (rec.payload.value("violation", false)) ++sum.violations;
            break;
        case EventKind::FeedbackInterval: {
            const auto interval = rec.payload.value("interval", Interval{0});
            IntervalRow& row = rows[interval];
            row.interval = interval;
            row.tasks = rec.payload.value("routed", std::uint64_t{0});
            break;
        }
        case EventKind::MessageDeliver: {
            if (rec.payload.value("msg", "") != "adjust_load_distribution") break;
            if (!rec.payload.contains("beta")) break; // interval had no correction
            const auto interval = rec.payload.value("interval", Interval{0});
            if (!corrected.insert(interval).second) break; // one copy per recipient
            IntervalRow& row = rows[interval];
            row.interval = interval;
            row.beta = rec.payload.value("beta", 0.0);
            row.oc = rec.payload.value("oc", 0.0);
            row.uc = rec.payload.value("uc", 0.0);
            row.adjustment = rec.payload.value("adjustment", 0.0);
            CorrectionReport cr;
            cr.adjustment = row.adjustment;
            const double cc_before = rec.payload.value("cc", 0.0) - row.adjustment;
            row.cd_percent = cc_before > 0.0 ? capacity_deviation_percent(cr, cc_before) : 0.0;
            break;
        }
        default: break;
        }
    }

    report.rows.reserve(rows.size());
    double cd_sum = 0.0;
    std::size_t cd_count = 0;
    for (const auto& [interval, row] : rows) {
        report.rows.push_back(row);
        if (row.beta > 0.0) {
            cd_sum += row.cd_percent;
            ++cd_count;
        }
    }
    sum.mean_cd_percent = cd_count > 0 ? cd_sum / static_cast<double>(cd_count) : 0.0;

    sum.fault_percent =
        sum.admitted > 0
            ? 100.0 * static_cast<double>(sum.admitted - sum.completed) /
                  static_cast<double>(sum.admitted)
            : 0.0;

    std::sort(responses.begin(), responses.end());
    if (!responses.empty()) {
        double total = 0.0;
        for (double r : responses) total += r;
        sum.response.mean = total / static_cast<double>(responses.size());
        sum.response.median = percentile(responses, 0.50);
        sum.response.p95 = percentile(responses, 0.95);
    }

    sum.cost = cost_benefit(trace, scenario);
    sum.truncated = trace.truncated;
    return report;
}

std::string export_csv(const MetricsReport& report) {
    std::string out = "interval,tasks,cd_percent,oc,uc,beta,adjustment\n";
    for (const IntervalRow& row : report.rows) {
        out += std::to_string(row.interval) + ',' + std::to_string(row.tasks) + ',' +
               fmt2(row.cd_percent) + ',' + fmt6(row.oc) + ',' + fmt6(row.uc) + ',' +
               fmt6(row.beta) + ',' + fmt6(row.adjustment) + '\n';
    }
    const MetricsSummary& s = report.summary;
    out += "# summary\n";
    out += "arrivals," + std::to_string(s.arrivals) + '\n';
    out += "duplicates," + std::to_string(s.duplicates) + '\n';
    out += "rejected_cost," + std::to_string(s.rejected_cost) + '\n';
    out += "rejected_time," + std::to_string(s.rejected_time) + '\n';
    out += "admitted," + std::to_string(s.admitted) + '\n';
    out += "completed," + std::to_string(s.completed) + '\n';
    out += "violations," + std::to_string(s.violations) + '\n';
    out += "fault_percent," + fmt2(s.fault_percent) + '\n';
    out += "mean_response," + fmt6(s.response.mean) + '\n';
    out += "median_response," + fmt6(s.response.median) + '\n';
    out += "p95_response," + fmt6(s.response.p95) + '\n';
    out += "provider_cost," + fmt6(s.cost.provider_cost) + '\n';
    out += "penalty_cost," + fmt6(s.cost.penalty_cost) + '\n';
    out += "revenue," + fmt6(s.cost.revenue) + '\n';
    out += "net_benefit," + fmt6(s.cost.net_benefit) + '\n';
    out += "mean_cd_percent," + fmt2(s.mean_cd_percent) + '\n';
    out += std::string("truncated,") + (s.truncated ? "1" : "0") + '\n';
    return out;
}

MetricsReport report_from_csv(const std::string& text) {
    MetricsReport report;
    std::istringstream in(text);
    std::string line;
    bool in_summary = false;
    bool header = true;
    std::map<std::string, std::string> summary;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "# summary") {
            in_summary = true;
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        if (!in_summary) {
            IntervalRow row;
            std::istringstream fields(line);
            std::string field;
            std::vector<std::string> parts;
            while (std::getline(fields, field, ',')) parts.push_back(field);
            if (parts.size() != 7) throw std::invalid_argument("bad report row: " + line);
            row.interval = std::stoll(parts[0]);
            row.tasks = std::stoull(parts[1]);
            row.cd_percent = std::stod(parts[2]);
            row.oc = std::stod(parts[3]);
            row.uc = std::stod(parts[4]);
            row.beta = std::stod(parts[5]);
            row.adjustment = std::stod(parts[6]);
            report.rows.push_back(row);
        } else {
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw std::invalid_argument("bad summary row: " + line);
            summary[line.substr(0, comma)] = line.substr(comma + 1);
        }
    }
    MetricsSummary& s = report.summary;
    auto u64 = [&](const char* key) {
        return summary.count(key) ? std::stoull(summary[key]) : 0ULL;
    };
    auto num = [&](const char* key) { return summary.count(key) ? std::stod(summary[key]) : 0.0; };
    s.arrivals = u64("arrivals");
    s.duplicates = u64("duplicates");
    s.rejected_cost = u64("rejected_cost");
    s.rejected_time = u64("rejected_time");
    s.admitted = u64("admitted");
    s.completed = u64("completed");
    s.violations = u64("violations");
    s.fault_percent = num("fault_percent");
    s.response.mean = num("mean_response");
    s.response.median = num("median_response");
    s.response.p95 = num("p95_response");
    s.cost.provider_cost = num("provider_cost");
    s.cost.penalty_cost = num("penalty_cost");
    s.cost.revenue = num("revenue");
    s.cost.net_benefit = num("net_benefit");
    s.mean_cd_percent = num("mean_cd_percent");
    s.truncated = summary.count("truncated") && summary["truncated"] == "1";
    return report;
}

nlohmann::ordered_json export_json(const MetricsReport& report) {
    nlohmann::ordered_json doc;
    auto& rows = doc["rows"] = nlohmann::ordered_json::array();
    for (const IntervalRow& row : report.rows) {
        rows.push_back({{"interval", row.interval},
                        {"tasks", row.tasks},
                        {"cd_percent", row.cd_percent},
                        {"oc", row.oc},
                        {"uc", row.uc},
                        {"beta", row.beta},
                        {"adjustment", row.adjustment}});
    }
    const MetricsSummary& s = report.summary;
    doc["summary"] = {{"arrivals", s.arrivals},
                      {"duplicates", s.duplicates},
                      {"rejected_cost", s.rejected_cost},
                      {"rejected_time", s.rejected_time},
                      {"admitted", s.admitted},
                      {"completed", s.completed},
                      {"violations", s.violations},
                      {"fault_percent", s.fault_percent},
                      {"mean_response", s.response.mean},
                      {"median_response", s.response.median},
                      {"p95_response", s.response.p95},
                      {"provider_cost", s.cost.provider_cost},
                      {"penalty_cost", s.cost.penalty_cost},
                      {"revenue", s.cost.revenue},
                      {"net_benefit", s.cost.net_benefit},
                      {"mean_cd_percent", s.mean_cd_percent},
                      {"truncated", s.truncated}};
    return doc;
}

} // namespace mlb
