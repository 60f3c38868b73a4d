#include "mlb/coordination.hpp"

#include "mlb/rng.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

using namespace mlb;

namespace {

ElectionMessage candidate(SchedulerId id, double responding, double capacity = 0.0) {
    ElectionMessage m;
    m.sender = id;
    m.responding_time = responding;
    m.capacity_score = capacity;
    return m;
}

Observation obs(SchedulerId s, ProcessorId p, Interval t, std::uint64_t x, std::uint64_t y) {
    Observation o;
    o.scheduler_id = s;
    o.processor_id = p;
    o.interval = t;
    o.processed = x;
    o.pending = y;
    return o;
}

} // namespace

TEST_CASE("isolated node elects itself") {
    CHECK(elect({}, 7) == 7);
}

TEST_CASE("greatest responding time wins") {
    CHECK(elect({candidate(1, 5), candidate(2, 9)}, 1) == 2);
}

TEST_CASE("capacity breaks responding-time ties, id breaks the rest") {
    CHECK(elect({candidate(1, 4, 10), candidate(2, 4, 20)}, 1) == 2);
    CHECK(elect({candidate(3, 4, 10), candidate(2, 4, 10)}, 3) == 2);
}

TEST_CASE("election is deterministic and order-independent") {
    SplitMix64 rng(31);
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<ElectionMessage> msgs;
        const int n = 1 + static_cast<int>(rng.uniform(0, 6));
        for (int i = 0; i < n; ++i) {
            msgs.push_back(candidate(static_cast<SchedulerId>(i + 1),
                                     std::floor(rng.uniform(0, 4)),
                                     std::floor(rng.uniform(0, 3))));
        }
        const SchedulerId from_a = elect(msgs, 1);
        std::reverse(msgs.begin(), msgs.end());
        const SchedulerId from_b = elect(msgs, 99);
        CHECK(from_a == from_b); // every receiver agrees on the same winner

        // the winner is maximal under the (responding, capacity, -id) order
        for (const auto& m : msgs) {
            const auto& w = *std::find_if(msgs.begin(), msgs.end(),
                                          [&](const auto& c) { return c.sender == from_a; });
            const bool beats = w.responding_time > m.responding_time ||
                               (w.responding_time == m.responding_time &&
                                w.capacity_score > m.capacity_score) ||
                               (w.responding_time == m.responding_time &&
                                w.capacity_score == m.capacity_score && w.sender <= m.sender);
            CHECK(beats);
        }
    }
}

TEST_CASE("record_observation overwrites by (processor, interval)") {
    Scheduler s;
    s.id = 1;
    record_observation(s, obs(1, 5, 0, 3, 1));
    CHECK(s.observations.size() == 1);
    record_observation(s, obs(1, 5, 0, 9, 2));
    CHECK(s.observations.size() == 1);
    CHECK(s.observations.at({5, 0}).processed == 9);
    record_observation(s, obs(1, 5, 1, 4, 0));
    CHECK(s.observations.size() == 2);
}

TEST_CASE("capacity estimation, worked example") {
    // two schedulers, one processor: X = {4, 6}, Y = {1, 1}
    const auto est = estimate_capacity(
        {obs(1, 1, 0, 4, 1), obs(2, 1, 0, 6, 1)}, 2, RcFormula::Printed);
    const auto& row = est.table.at(1);
    CHECK(row.aggregated_processed == doctest::Approx(10));
    CHECK(row.aggregated_pending == doctest::Approx(2));
    CHECK(row.estimated_requests == doctest::Approx(10));
    CHECK(row.estimated_capability == doctest::Approx(5)); // 10 / max(1, 2)
    CHECK(est.total_tasks == doctest::Approx(10));
    CHECK(est.per_scheduler_quota == doctest::Approx(5));
}

TEST_CASE("zero pending hits the max(1, .) floor") {
    const auto est = estimate_capacity({obs(1, 1, 0, 7, 0)}, 1, RcFormula::Printed);
    CHECK(est.table.at(1).estimated_capability == doctest::Approx(7));
}

TEST_CASE("relative capability formulas") {
    const std::vector<Observation> data{obs(1, 1, 0, 8, 1), obs(1, 2, 0, 4, 0)};
    // EC_1 = 8, EC_2 = 4, sum EC = 12
    const auto printed = estimate_capacity(data, 1, RcFormula::Printed);
    CHECK(printed.table.at(1).relative_capability == doctest::Approx(8.0 / 12.0));
    CHECK(printed.table.at(2).relative_capability == doctest::Approx(4.0 / 12.0));
    const auto normalized = estimate_capacity(data, 1, RcFormula::Normalized);
    CHECK(normalized.table.at(1).relative_capability == doctest::Approx(8.0 / 12.0));
    CHECK(normalized.table.at(2).relative_capability == doctest::Approx(4.0 / 12.0));

    // the two formulas differ once pending dampens a capability
    const std::vector<Observation> uneven{obs(1, 1, 0, 8, 3), obs(1, 2, 0, 4, 0)};
    // EC_1 = 8/3, EC_2 = 4, sum = 20/3
    const auto p = estimate_capacity(uneven, 1, RcFormula::Printed);
    CHECK(p.table.at(1).relative_capability == doctest::Approx(8.0 / (20.0 / 3.0)));
    const auto n = estimate_capacity(uneven, 1, RcFormula::Normalized);
    CHECK(n.table.at(1).relative_capability == doctest::Approx((8.0 / 3.0) / (20.0 / 3.0)));
}

TEST_CASE("estimation matches a straight-line oracle on random inputs") {
    SplitMix64 rng(123);
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<Observation> data;
        const int n_sched = 3, n_proc = 2;
        for (int s = 1; s <= n_sched; ++s) {
            for (int p = 1; p <= n_proc; ++p) {
                data.push_back(obs(s, p, 4, static_cast<std::uint64_t>(rng.uniform(0, 9)),
                                   static_cast<std::uint64_t>(rng.uniform(0, 9))));
            }
        }
        const auto est = estimate_capacity(data, n_sched, RcFormula::Printed);

        // independent re-computation
        std::map<ProcessorId, double> ap, pr;
        for (const auto& o : data) {
            ap[o.processor_id] += static_cast<double>(o.processed);
            pr[o.processor_id] += static_cast<double>(o.pending);
        }
        double total = 0, ec_sum = 0;
        std::map<ProcessorId, double> ec;
        for (const auto& [pid, a] : ap) {
            ec[pid] = a / std::max(1.0, pr[pid]);
            total += a;
            ec_sum += ec[pid];
        }
        CHECK(est.total_tasks == doctest::Approx(total).epsilon(1e-12));
        for (const auto& [pid, row] : est.table) {
            CHECK(row.aggregated_processed == doctest::Approx(ap[pid]).epsilon(1e-12));
            CHECK(row.aggregated_pending == doctest::Approx(pr[pid]).epsilon(1e-12));
            CHECK(row.estimated_capability == doctest::Approx(ec[pid]).epsilon(1e-12));
            const double rc = ec_sum > 0 ? ap[pid] / ec_sum : 0.0;
            CHECK(row.relative_capability == doctest::Approx(rc).epsilon(1e-12));
        }
        CHECK(est.per_scheduler_quota == doctest::Approx(total / n_sched).epsilon(1e-12));
    }
}

TEST_CASE("estimation is invariant under scheduler relabeling") {
    std::vector<Observation> data{obs(1, 1, 2, 3, 1), obs(2, 1, 2, 5, 0), obs(3, 2, 2, 2, 4)};
    const auto before = estimate_capacity(data, 3, RcFormula::Printed);
    for (auto& o : data) o.scheduler_id = (o.scheduler_id % 3) + 1; // shuffle reporters
    std::rotate(data.begin(), data.begin() + 1, data.end());
    const auto after = estimate_capacity(data, 3, RcFormula::Printed);
    for (const auto& [pid, row] : before.table) {
        CHECK(after.table.at(pid).estimated_capability ==
              doctest::Approx(row.estimated_capability));
        CHECK(after.table.at(pid).relative_capability ==
              doctest::Approx(row.relative_capability));
    }
}

TEST_CASE("quota split conserves the total, remainder to lowest ids") {
    const auto q = split_quota(11, {3, 1, 2});
    CHECK(q.at(1) == 4);
    CHECK(q.at(2) == 4);
    CHECK(q.at(3) == 3);
    std::uint64_t sum = 0;
    for (const auto& [sid, v] : q) sum += v;
    CHECK(sum == 11);
}

TEST_CASE("quota split conservation property") {
    SplitMix64 rng(5150);
    for (int iter = 0; iter < 200; ++iter) {
        const auto total = static_cast<std::uint64_t>(rng.uniform(0, 100));
        const int n = 1 + static_cast<int>(rng.uniform(0, 6));
        std::vector<SchedulerId> ids(n);
        std::iota(ids.begin(), ids.end(), 1);
        const auto q = split_quota(total, ids);
        std::uint64_t sum = 0;
        std::uint64_t lo = total, hi = 0;
        for (const auto& [sid, v] : q) {
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(sum == total);
        CHECK(hi - lo <= 1);
    }
}

TEST_CASE("largest remainder split follows the weights") {
    const auto split = largest_remainder_split(10, {3.0, 1.0});
    CHECK(split[0] == 8);
    CHECK(split[1] == 2);
    const auto even = largest_remainder_split(5, {0.0, 0.0, 0.0});
    CHECK(even[0] + even[1] + even[2] == 5);
    CHECK(even[0] == 2);
}

TEST_CASE("failure detection threshold is three") {
    CHECK_FALSE(detect_coordinator_failure(0));
    CHECK_FALSE(detect_coordinator_failure(2));
    CHECK(detect_coordinator_failure(3));
    CHECK(detect_coordinator_failure(5));
}

TEST_CASE("standard value") {
    CHECK(standard_value(100, 20) == doctest::Approx(5.0));
    CHECK(standard_value(40, 40) == doctest::Approx(1.0));
    // linear in capacity
    CHECK(standard_value(200, 20) == doctest::Approx(10.0));
    CHECK_THROWS_AS(standard_value(100, 0), std::domain_error);
}

TEST_CASE("variation classification") {
    auto v = classify_variation(6, 5);
    CHECK(v.kind == VariationKind::Success);
    CHECK(v.magnitude == doctest::Approx(0.2));
    v = classify_variation(4, 5);
    CHECK(v.kind == VariationKind::Failure);
    CHECK(v.magnitude == doctest::Approx(0.2));
    v = classify_variation(5, 5);
    CHECK(v.kind == VariationKind::Neither);
    CHECK(v.magnitude == 0.0);
    CHECK_THROWS_AS(classify_variation(1, 0), std::domain_error);
}

TEST_CASE("capacity correction, both branches") {
    const std::vector<Variation> over{{VariationKind::Success, 2.0},
                                      {VariationKind::Failure, 1.0}};
    auto rep = capacity_correction(over, 100, 50, false);
    CHECK(rep.over_capacity == doctest::Approx(2.0));
    CHECK(rep.under_capacity == doctest::Approx(1.0));
    CHECK(rep.capacity_deviation == doctest::Approx(1.0));
    CHECK(rep.adjustment == doctest::Approx(2.0)); // (100/50) * 1

    const std::vector<Variation> under{{VariationKind::Success, 1.0},
                                       {VariationKind::Failure, 2.0}};
    rep = capacity_correction(under, 100, 49, false);
    CHECK(rep.capacity_deviation == doctest::Approx(1.0));
    CHECK(rep.adjustment == doctest::Approx(-2.0)); // -1 * (100 / (49 + 1))

    // balanced variations cancel
    const std::vector<Variation> balanced{{VariationKind::Success, 1.5},
                                          {VariationKind::Failure, 1.5}};
    rep = capacity_correction(balanced, 100, 10, false);
    CHECK(rep.capacity_deviation == 0.0);
    CHECK(rep.adjustment == 0.0);

    CHECK_THROWS_AS(capacity_correction(over, 100, 0, false), std::domain_error);
}

TEST_CASE("corrected semantics swaps the branches") {
    const std::vector<Variation> under{{VariationKind::Failure, 2.0}};
    auto rep = capacity_correction(under, 100, 50, true);
    CHECK(rep.adjustment == doctest::Approx((100.0 / 50.0) * 2.0)); // growth on under-capacity

    const std::vector<Variation> over{{VariationKind::Success, 2.0}};
    rep = capacity_correction(over, 100, 50, true);
    CHECK(rep.adjustment == doctest::Approx(-2.0 * (100.0 / 52.0)));
}

TEST_CASE("adjustment is degree-one homogeneous in the deviation") {
    for (double k : {1.0, 2.0, 5.0}) {
        const std::vector<Variation> vars{{VariationKind::Success, 0.4 * k}};
        const auto rep = capacity_correction(vars, 80, 40, false);
        CHECK(rep.adjustment == doctest::Approx((80.0 / 40.0) * 0.4 * k));
    }
}
