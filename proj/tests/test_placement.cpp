#include "mlb/placement.hpp"

#include "mlb/rng.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <map>
#include <set>
#include <vector>

using namespace mlb;

TEST_CASE("response time is transmission plus processing") {
    CHECK(response_time(100, 10, 20) == doctest::Approx(15.0));
    CHECK(response_time(0, 10, 20) == doctest::Approx(0.0));
    // symmetric terms when bandwidth equals speed
    CHECK(response_time(30, 6, 6) == doctest::Approx(2.0 * 30 / 6));
    CHECK_THROWS_AS(response_time(10, 0, 5), std::domain_error);
    CHECK_THROWS_AS(response_time(10, 5, -1), std::domain_error);
}

TEST_CASE("processing cost") {
    CHECK(processing_cost(100, 20, 2) == doctest::Approx(10.0));
    CHECK(processing_cost(100, 20, 0) == doctest::Approx(0.0));
    // doubling speed halves cost
    CHECK(processing_cost(100, 40, 2) == doctest::Approx(5.0));
    CHECK_THROWS_AS(processing_cost(10, 0, 1), std::domain_error);
}

TEST_CASE("profit is processing cost minus task cost, sign as written") {
    CHECK(profit(100, 20, 2, 4) == doctest::Approx(6.0));
    CHECK(profit(100, 20, 2, 10) == doctest::Approx(0.0)); // break-even
    CHECK(profit(100, 20, 2, 20) == doctest::Approx(-10.0));
}

TEST_CASE("energy is busy time times rate") {
    CHECK(energy(100, 20, 3) == doctest::Approx(15.0));
    CHECK(energy(100, 20, 0) == doctest::Approx(0.0));
    // linear in size
    CHECK(energy(200, 20, 3) == doctest::Approx(30.0));
    CHECK_THROWS_AS(energy(10, 0, 1), std::domain_error);
    CHECK_THROWS_AS(energy(10, 1, -1), std::domain_error);
}

namespace {

std::map<std::pair<TaskId, ProcessorId>, ObjectiveTriple> table1() {
    std::map<std::pair<TaskId, ProcessorId>, ObjectiveTriple> t;
    t[{1, 1}] = {8, 100, 100};
    t[{1, 2}] = {12, 15, 50};
    t[{1, 3}] = {14, 10, 30};
    t[{2, 1}] = {9, 20, 40};
    t[{2, 2}] = {19, 10, 90};
    t[{2, 3}] = {21, 50, 50};
    t[{3, 1}] = {9, 10, 10};
    t[{3, 2}] = {21, 50, 50};
    t[{3, 3}] = {11, 40, 70};
    return t;
}

// Straight-line oracle: explicit rank counting and winner scan, independent of
// the library's implementation.
ProcessorId oracle_winner(
    TaskId task, const std::map<std::pair<TaskId, ProcessorId>, ObjectiveTriple>& triples,
    const std::set<ProcessorId>& live) {
    struct Entry {
        ProcessorId proc;
        ObjectiveTriple t;
        int sum = 0;
    };
    std::vector<Entry> entries;
    for (ProcessorId p : live) entries.push_back({p, triples.at({task, p}), 0});
    for (Entry& e : entries) {
        int rt_rank = 1, en_rank = 1, pr_rank = 1;
        for (const Entry& o : entries) {
            if (o.t.response_time < e.t.response_time) ++rt_rank;
            if (o.t.energy < e.t.energy) ++en_rank;
            if (o.t.profit > e.t.profit) ++pr_rank;
        }
        e.sum = rt_rank + en_rank + pr_rank;
    }
    const Entry* best = &entries.front();
    for (const Entry& e : entries) {
        if (e.sum < best->sum) best = &e;
        else if (e.sum == best->sum && e.t.response_time < best->t.response_time) best = &e;
        else if (e.sum == best->sum && e.t.response_time == best->t.response_time &&
                 e.proc < best->proc) {
            best = &e;
        }
    }
    return best->proc;
}

} // namespace

TEST_CASE("three-task golden assignment with response-time tie break") {
    const auto result = rank_assign(table1(), {1, 2, 3});
    CHECK(result.assignment.at(1) == 1);
    CHECK(result.assignment.at(2) == 2);
    CHECK(result.assignment.at(3) == 1); // ties processor 3 on rank sum, wins on RT
    CHECK(result.rank_sums.at({3, 1}) == 5);
    CHECK(result.rank_sums.at({3, 3}) == 5);
}

TEST_CASE("single live processor takes every task") {
    const auto result = rank_assign(table1(), {2});
    for (TaskId task : {1, 2, 3}) CHECK(result.assignment.at(task) == 2);
}

TEST_CASE("empty live set is an error") {
    CHECK_THROWS_AS(rank_assign(table1(), {}), std::invalid_argument);
}

TEST_CASE("random instances match the brute-force oracle") {
    SplitMix64 rng(2024);
    for (int iter = 0; iter < 500; ++iter) {
        std::map<std::pair<TaskId, ProcessorId>, ObjectiveTriple> triples;
        std::set<ProcessorId> live{1, 2, 3, 4};
        for (TaskId task = 1; task <= 4; ++task) {
            for (ProcessorId proc : live) {
                // small integer grid to provoke plenty of ties
                triples[{task, proc}] = {std::floor(rng.uniform(1, 6)),
                                         std::floor(rng.uniform(1, 6)),
                                         std::floor(rng.uniform(1, 6))};
            }
        }
        const auto result = rank_assign(triples, live);
        for (TaskId task = 1; task <= 4; ++task) {
            CAPTURE(iter);
            CAPTURE(task);
            CHECK(result.assignment.at(task) == oracle_winner(task, triples, live));
        }
    }
}

TEST_CASE("winner is invariant under positive scaling of one criterion") {
    SplitMix64 rng(77);
    for (int iter = 0; iter < 200; ++iter) {
        std::map<std::pair<TaskId, ProcessorId>, ObjectiveTriple> base;
        std::set<ProcessorId> live{1, 2, 3};
        for (ProcessorId proc : live) {
            base[{1, proc}] = {rng.uniform(1, 9), rng.uniform(1, 9), rng.uniform(1, 9)};
        }
        const auto before = rank_assign(base, live).assignment.at(1);

        const double scale = rng.uniform(0.1, 10.0);
        const int criterion = iter % 3;
        auto scaled = base;
        for (auto& [key, t] : scaled) {
            if (criterion == 0) t.response_time *= scale;
            else if (criterion == 1) t.energy *= scale;
            else t.profit *= scale;
        }
        CHECK(rank_assign(scaled, live).assignment.at(1) == before);
    }
}

TEST_CASE("objectives are strictly monotone in size") {
    double prev_rt = 0, prev_cost = 0, prev_energy = 0;
    for (double size = 5; size <= 50; size += 5) {
        const double rt = response_time(size, 7, 3);
        const double c = processing_cost(size, 3, 2);
        const double e = energy(size, 3, 4);
        CHECK(rt > prev_rt);
        CHECK(c > prev_cost);
        CHECK(e > prev_energy);
        prev_rt = rt;
        prev_cost = c;
        prev_energy = e;
    }
}
