#include "mlb/admission.hpp"

#include "mlb/rng.hpp"

#include <doctest.h>

#include <stdexcept>

#include <map>
#include <set>

using namespace mlb;

namespace {

Task make_task(TaskId id, std::uint64_t user, std::uint64_t fingerprint) {
    Task t;
    t.id = id;
    t.user_id = user;
    t.payload_fingerprint = fingerprint;
    t.size = 1;
    t.deadline_hint = 1;
    return t;
}

} // namespace

TEST_CASE("deduplicate keeps first occurrences in order") {
    const Task t1 = make_task(1, 7, 100);
    const Task t1_copy = make_task(2, 7, 100);
    const Task t2 = make_task(3, 7, 200);
    const auto out = deduplicate({t1, t1_copy, t2});
    REQUIRE(out.size() == 2);
    CHECK(out[0].id == 1);
    CHECK(out[1].id == 3);
}

TEST_CASE("deduplicate of nothing is nothing") {
    CHECK(deduplicate({}).empty());
}

TEST_CASE("same fingerprint from different users survives") {
    const auto out = deduplicate({make_task(1, 1, 42), make_task(2, 2, 42)});
    CHECK(out.size() == 2);
}

TEST_CASE("dedup against a quadratic membership oracle") {
    // 2 users x 10 distinct fingerprints, 100 tasks total.
    std::vector<Task> batch;
    for (TaskId id = 1; id <= 100; ++id) {
        batch.push_back(make_task(id, 1 + (id / 10) % 2, id % 10));
    }
    const auto out = deduplicate(batch);

    // Oracle: pairwise scan marking later equals.
    std::vector<Task> expect;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        bool duplicate = false;
        for (std::size_t j = 0; j < i; ++j) {
            if (batch[j].user_id == batch[i].user_id &&
                batch[j].payload_fingerprint == batch[i].payload_fingerprint) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) expect.push_back(batch[i]);
    }
    REQUIRE(out.size() == expect.size());
    CHECK(out.size() == 20);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].id == expect[i].id);
}

TEST_CASE("deduplicate is idempotent") {
    std::vector<Task> batch;
    SplitMix64 rng(9);
    for (TaskId id = 1; id <= 60; ++id) {
        batch.push_back(make_task(id, 1 + id % 3,
                                  static_cast<std::uint64_t>(rng.uniform(0, 8))));
    }
    const auto once = deduplicate(batch);
    const auto twice = deduplicate(once);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(once[i].id == twice[i].id);
}

TEST_CASE("sla gate, cost and time branches") {
    Task t;
    t.size = 1;
    t.cost = 12;
    t.deadline_hint = 10;

    SlaPolicy policy;
    policy.cost_margin = 0.1;
    policy.time_margin = 1.0;

    CHECK(sla_admit(t, {10.0, 2.0}, policy) == AdmissionDecision::Accepted);

    t.cost = 10; // 10 < 11
    CHECK(sla_admit(t, {10.0, 2.0}, policy) == AdmissionDecision::RejectedCost);

    t.cost = 12;
    CHECK(sla_admit(t, {10.0, 10.0}, policy) == AdmissionDecision::Accepted); // boundary inclusive
    CHECK(sla_admit(t, {10.0, 10.0001}, policy) == AdmissionDecision::RejectedTime);

    // cost branch named first on a double miss
    t.cost = 0;
    CHECK(sla_admit(t, {10.0, 99.0}, policy) == AdmissionDecision::RejectedCost);
}

TEST_CASE("cheapest estimate takes per-criterion minima over Up processors") {
    Task t;
    t.size = 100;
    Processor slow_cheap;
    slow_cheap.id = 1;
    slow_cheap.speed = 10;
    slow_cheap.bandwidth = 100;
    slow_cheap.price = 0.1;
    Processor fast_pricey;
    fast_pricey.id = 2;
    fast_pricey.speed = 100;
    fast_pricey.bandwidth = 100;
    fast_pricey.price = 10;

    auto est = cheapest_estimate(t, {slow_cheap, fast_pricey});
    REQUIRE(est.has_value());
    CHECK(est->price_cost == doctest::Approx(1.0)); // from the cheap one
    CHECK(est->response_time == doctest::Approx(2.0)); // from the fast one

    slow_cheap.status = ProcessorStatus::Down;
    fast_pricey.status = ProcessorStatus::Down;
    CHECK_FALSE(cheapest_estimate(t, {slow_cheap, fast_pricey}).has_value());
}

TEST_CASE("round robin cycles from the cursor") {
    const auto rr = dispatch_round_robin({1, 2, 3, 4, 5}, {10, 20, 30}, 0);
    REQUIRE(rr.assignments.size() == 5);
    CHECK(rr.assignments[0].second == 10);
    CHECK(rr.assignments[1].second == 20);
    CHECK(rr.assignments[2].second == 30);
    CHECK(rr.assignments[3].second == 10);
    CHECK(rr.assignments[4].second == 20);
    CHECK(rr.new_cursor == 2);
}

TEST_CASE("round robin singleton") {
    const auto rr = dispatch_round_robin({9}, {4}, 0);
    CHECK(rr.assignments[0].second == 4);
    CHECK(rr.new_cursor == 0);
}

TEST_CASE("round robin spread differs by at most one, any cursor") {
    // brute force over all cursors
    for (std::size_t cursor = 0; cursor < 3; ++cursor) {
        std::vector<TaskId> tasks;
        for (TaskId id = 1; id <= 7; ++id) tasks.push_back(id);
        const auto rr = dispatch_round_robin(tasks, {1, 2, 3}, cursor);
        std::map<SchedulerId, int> counts;
        for (const auto& [task, sched] : rr.assignments) ++counts[sched];
        std::multiset<int> histogram;
        for (const auto& [sched, n] : counts) histogram.insert(n);
        CHECK(histogram == std::multiset<int>{2, 2, 3});
        CHECK(rr.new_cursor == (cursor + 7) % 3);
    }
}

TEST_CASE("round robin fairness over whole windows") {
    std::vector<TaskId> tasks;
    for (TaskId id = 1; id <= 4 * 5; ++id) tasks.push_back(id);
    const auto rr = dispatch_round_robin(tasks, {1, 2, 3, 4}, 2);
    std::map<SchedulerId, int> counts;
    for (const auto& [task, sched] : rr.assignments) ++counts[sched];
    for (const auto& [sched, n] : counts) CHECK(n == 5);
}

TEST_CASE("round robin with no scheduler is an error") {
    CHECK_THROWS_AS(dispatch_round_robin({1}, {}, 0), std::invalid_argument);
}

TEST_CASE("reclaim preserves content and order") {
    const std::vector<TaskId> queue{5, 6};
    CHECK(reclaim(queue) == queue);
    CHECK(reclaim({}).empty());
}
