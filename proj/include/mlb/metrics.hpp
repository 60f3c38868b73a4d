#pragma once

#include "mlb/coordination.hpp"
#include "mlb/event.hpp"
#include "mlb/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mlb {

/// One feedback interval of the run. `tasks` is the number of requests routed
/// to schedulers during the interval (TR); a row whose beta is zero saw no
/// correction (no demand or no requests).
struct IntervalRow {
    Interval interval = 0;
    std::uint64_t tasks = 0;
    double cd_percent = 0.0;
    double oc = 0.0;
    double uc = 0.0;
    double beta = 0.0;
    double adjustment = 0.0;
};

struct ResponseStats {
    double mean = 0.0;
    double median = 0.0; // nearest-rank
    double p95 = 0.0;    // nearest-rank
};

struct CostBenefit {
    double provider_cost = 0.0;
    double penalty_cost = 0.0;
    double revenue = 0.0;
    double net_benefit = 0.0;
};

struct MetricsSummary {
    std::uint64_t arrivals = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t rejected_cost = 0;
    std::uint64_t rejected_time = 0;
    std::uint64_t admitted = 0;
    std::uint64_t completed = 0;
    std::uint64_t violations = 0;
    double fault_percent = 0.0;
    ResponseStats response;
    CostBenefit cost;
    double mean_cd_percent = 0.0; // over intervals where a correction ran
    bool truncated = false;
};

struct MetricsReport {
    std::vector<IntervalRow> rows; // ordered by interval
    MetricsSummary summary;
};

/// 100 * |adjustment| / CC: the relative extra (or surplus) capacity the
/// correction demands. CC must be positive.
double capacity_deviation_percent(const CorrectionReport& report, double cluster_capacity);

/// 100 * (admitted tasks that never complete) / admitted; zero when nothing
/// was admitted. Deadline-missing completions are violations, not faults.
double fault_percentage(const EventTrace& trace);

/// provider cost = Up-processor seconds priced at the server rate, penalty =
/// violations priced at the SLA penalty, revenue = offered cost of completed
/// tasks; net = revenue - provider - penalty.
CostBenefit cost_benefit(const EventTrace& trace, const Scenario& scenario);

MetricsReport build_report(const EventTrace& trace, const Scenario& scenario);

/// CSV with the fixed header `interval,tasks,cd_percent,oc,uc,beta,adjustment`,
/// one row per interval, then a `# summary` block. Percentages carry two
/// decimals; the output is byte-stable for a fixed report.
std::string export_csv(const MetricsReport& report);
MetricsReport report_from_csv(const std::string& text);

/// Structured mirror of the CSV fields.
nlohmann::ordered_json export_json(const MetricsReport& report);

} // namespace mlb
