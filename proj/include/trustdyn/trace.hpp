#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trustdyn/core.hpp"
#include "trustdyn/trust.hpp"

namespace trustdyn {

struct BeliefRecord {
  int topic = 1;
  int round = 0;
  int agent = 0;
  double belief = 0.0;
};

/// Outcome of one topic.
struct TopicSummary {
  int topic = 1;
  double mu = 0.0;
  Vector initial;            // b^k(0)
  Vector limit;              // beliefs when the within-topic loop stopped
  int rounds = 0;
  bool converged = false;
  bool consensus = false;
  std::optional<double> consensus_value;
  bool diverged = false;
  bool weights_converged = true;  // homophily only
  std::size_t clusters = 1;
  TruthfulSet truthful;           // set used for the cross-topic adjustment
  bool adjustment_skipped = false;  // tau = limit with a non-converged run

  double offset() const { return limit.size() ? limit.mean() - mu : 0.0; }
};

struct WeightSnapshot {
  int topic = 1;  // matrix in force at the start of this topic; K+1 is the final one
  Matrix weights;
};

struct TraceMetadata {
  std::string model;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version;
};

/// Everything a scenario run produces. Belief records are ordered by
/// (topic, round, agent).
struct SimulationTrace {
  TraceMetadata metadata;
  std::vector<BeliefRecord> records;
  std::vector<TopicSummary> topics;
  std::vector<WeightSnapshot> weights;
  Matrix final_weights;
};

}  // namespace trustdyn
