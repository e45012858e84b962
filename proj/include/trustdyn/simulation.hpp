#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "trustdyn/scenario.hpp"
#include "trustdyn/trace.hpp"

namespace trustdyn {

inline constexpr std::string_view kVersion = "1.0.0";

/// Runs one replication of the scenario with the given seed.
SimulationTrace simulate(const ScenarioConfig& cfg, std::uint64_t seed);
SimulationTrace simulate(const ScenarioConfig& cfg);

/// simulate() restricted to homophily scenarios (ConfigInvalid otherwise).
SimulationTrace run_scenario_homophily(const ScenarioConfig& cfg);

/// Seeds used for the replications: seed, seed + 1, ...
std::vector<std::uint64_t> replication_seeds(const ScenarioConfig& cfg);

/// All replications, run on up to `threads` workers and returned in seed order.
std::vector<SimulationTrace> simulate_replications(const ScenarioConfig& cfg, unsigned threads = 1);

/// Column mass of a row-stochastic matrix's influence vector summed per group,
/// in group order. Requires consensus.
std::vector<double> group_influence(const RowStochasticMatrix& w, const std::vector<GroupSpec>& groups);

}  // namespace trustdyn
