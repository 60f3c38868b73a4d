#include "mlb/placement.hpp"

#include <stdexcept>
#include <vector>

namespace mlb {

double response_time(double size, double bandwidth, double speed) {
    if (bandwidth <= 0.0 || speed <= 0.0) {
        throw std::domain_error("response_time: bandwidth and speed must be positive");
    }
    return size / bandwidth + size / speed;
}

double processing_cost(double size, double speed, double price) {
    if (speed <= 0.0) {
        throw std::domain_error("processing_cost: speed must be positive");
    }
    return (size / speed) * price;
}

double profit(double size, double speed, double price, double task_cost) {
    return processing_cost(size, speed, price) - task_cost;
}

double energy(double size, double speed, double energy_rate) {
    if (speed <= 0.0) {
        throw std::domain_error("energy: speed must be positive");
    }
    if (energy_rate < 0.0) {
        throw std::domain_error("energy: rate must be non-negative");
    }
    return (size / speed) * energy_rate;
}

namespace {

// Competition rank: 1 + number of strictly better competitors.
int rank_of(double value, const std::vector<double>& values, bool lower_is_better) {
    int better = 0;
    for (double v : values) {
        if (lower_is_better ? v < value : v > value) ++better;
    }
    return 1 + better;
}

} // namespace

PlacementResult rank_assign(const std::map<std::pair<TaskId, ProcessorId>, ObjectiveTriple>& triples,
                            const std::set<ProcessorId>& live) {
    if (live.empty()) {
        throw std::invalid_argument("no processor available");
    }

    std::set<TaskId> tasks;
    for (const auto& [key, triple] : triples) tasks.insert(key.first);

    PlacementResult result;
    for (TaskId task : tasks) {
        std::vector<ProcessorId> procs;
        std::vector<double> rts, energies, profits;
        for (ProcessorId proc : live) {
            auto it = triples.find({task, proc});
            if (it == triples.end()) {
                throw std::invalid_argument("rank_assign: missing objective triple");
            }
            procs.push_back(proc);
            rts.push_back(it->second.response_time);
            energies.push_back(it->second.energy);
            profits.push_back(it->second.profit);
        }

        ProcessorId winner = procs.front();
        int winner_sum = 0;
        double winner_rt = 0.0;
        for (std::size_t i = 0; i < procs.size(); ++i) {
            const int sum = rank_of(rts[i], rts, true) + rank_of(energies[i], energies, true) +
                            rank_of(profits[i], profits, false);
            result.rank_sums[{task, procs[i]}] = sum;
            const bool wins = i == 0 || sum < winner_sum ||
                              (sum == winner_sum && rts[i] < winner_rt) ||
                              (sum == winner_sum && rts[i] == winner_rt && procs[i] < winner);
            if (wins) {
                winner = procs[i];
                winner_sum = sum;
                winner_rt = rts[i];
            }
        }
        result.assignment[task] = winner;
    }
    return result;
}

} // namespace mlb
