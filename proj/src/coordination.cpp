#include "mlb/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mlb {

SchedulerId elect(const std::vector<ElectionMessage>& candidates, SchedulerId self) {
    if (candidates.empty()) {
        return self; // isolated node elects itself
    }
    const ElectionMessage* best = &candidates.front();
    for (const ElectionMessage& c : candidates) {
        if (c.responding_time > best->responding_time ||
            (c.responding_time == best->responding_time &&
             c.capacity_score > best->capacity_score) ||
            (c.responding_time == best->responding_time &&
             c.capacity_score == best->capacity_score && c.sender < best->sender)) {
            best = &c;
        }
    }
    return best->sender;
}

void record_observation(Scheduler& scheduler, const Observation& obs) {
    scheduler.observations[{obs.processor_id, obs.interval}] = obs;
}

CapacityEstimation estimate_capacity(const std::vector<Observation>& observations,
                                     int n_schedulers, RcFormula formula) {
    if (n_schedulers < 1) {
        throw std::invalid_argument("estimate_capacity: n_schedulers must be >= 1");
    }
    CapacityEstimation result;
    for (const Observation& obs : observations) {
        CapabilityEstimate& row = result.table[obs.processor_id];
        row.processor_id = obs.processor_id;
        row.interval = obs.interval;
        row.aggregated_processed += static_cast<double>(obs.processed);
        row.aggregated_pending += static_cast<double>(obs.pending);
    }

    double capability_total = 0.0;
    for (auto& [id, row] : result.table) {
        row.estimated_requests = row.aggregated_processed;
        row.estimated_capability =
            row.estimated_requests / std::max(1.0, row.aggregated_pending);
        result.total_tasks += row.estimated_requests;
        capability_total += row.estimated_capability;
    }
    for (auto& [id, row] : result.table) {
        if (capability_total <= 0.0) {
            row.relative_capability = 0.0;
        } else if (formula == RcFormula::Printed) {
            row.relative_capability = row.estimated_requests / capability_total;
        } else {
            row.relative_capability = row.estimated_capability / capability_total;
        }
    }
    result.per_scheduler_quota = result.total_tasks / static_cast<double>(n_schedulers);
    return result;
}

std::vector<std::uint64_t> largest_remainder_split(std::uint64_t total,
                                                   const std::vector<double>& weights) {
    std::vector<std::uint64_t> out(weights.size(), 0);
    if (weights.empty() || total == 0) return out;

    double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> shares(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        shares[i] = sum > 0.0 ? static_cast<double>(total) * weights[i] / sum
                              : static_cast<double>(total) / static_cast<double>(weights.size());
    }

    std::uint64_t assigned = 0;
    std::vector<double> fractions(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = static_cast<std::uint64_t>(std::floor(shares[i]));
        fractions[i] = shares[i] - std::floor(shares[i]);
        assigned += out[i];
    }

    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fractions[a] > fractions[b];
    });
    for (std::size_t k = 0; assigned < total; ++k) {
        out[order[k % order.size()]] += 1;
        ++assigned;
    }
    return out;
}

std::map<SchedulerId, std::uint64_t> split_quota(std::uint64_t total,
                                                 const std::vector<SchedulerId>& schedulers) {
    std::vector<SchedulerId> ids = schedulers;
    std::sort(ids.begin(), ids.end());
    const auto split = largest_remainder_split(total, std::vector<double>(ids.size(), 1.0));
    std::map<SchedulerId, std::uint64_t> out;
    for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = split[i];
    return out;
}

bool detect_coordinator_failure(int missed_multicasts) {
    return missed_multicasts >= 3;
}

double standard_value(double cluster_capacity, double total_tasks) {
    if (total_tasks <= 0.0) {
        throw std::domain_error("standard_value: no demand");
    }
    return cluster_capacity / total_tasks;
}

Variation classify_variation(double measured_throughput, double beta) {
    if (beta <= 0.0) {
        throw std::domain_error("classify_variation: beta must be positive");
    }
    if (measured_throughput > beta) {
        return {VariationKind::Success, (measured_throughput - beta) / beta};
    }
    if (measured_throughput < beta) {
        return {VariationKind::Failure, (beta - measured_throughput) / beta};
    }
    return {VariationKind::Neither, 0.0};
}

CorrectionReport capacity_correction(const std::vector<Variation>& variations,
                                     double cluster_capacity, double total_requests,
                                     bool corrected_semantics) {
    if (total_requests <= 0.0) {
        throw std::domain_error("capacity_correction: no requests");
    }
    CorrectionReport report;
    for (const Variation& v : variations) {
        if (v.kind == VariationKind::Success) {
            report.success_variations.push_back(v.magnitude);
            report.over_capacity += v.magnitude;
        } else if (v.kind == VariationKind::Failure) {
            report.failure_variations.push_back(v.magnitude);
            report.under_capacity += v.magnitude;
        }
    }
    report.capacity_deviation = std::fabs(report.over_capacity - report.under_capacity);

    const double increase =
        (cluster_capacity / total_requests) * report.capacity_deviation;
    const double reduction = report.capacity_deviation *
                             (cluster_capacity / (total_requests + report.capacity_deviation));
    const bool over_dominates = report.over_capacity >= report.under_capacity;
    if (corrected_semantics) {
        // Swapped reading: dominant under-capacity grows the cluster.
        report.adjustment = over_dominates ? -reduction : increase;
    } else {
        report.adjustment = over_dominates ? increase : -reduction;
    }
    if (report.capacity_deviation == 0.0) {
        report.adjustment = 0.0;
    }
    return report;
}

} // namespace mlb
