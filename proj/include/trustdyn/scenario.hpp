#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustdyn/beliefs.hpp"
#include "trustdyn/conformity.hpp"
#include "trustdyn/degroot.hpp"
#include "trustdyn/homophily.hpp"
#include "trustdyn/opposition.hpp"

namespace trustdyn {

enum class ModelKind { Standard, DeMarzo, Opposition, Conformity, Homophily };

std::string_view to_string(ModelKind m);

struct InitialWeights {
  enum class Kind { Identity, Uniform, Explicit, Block };
  Kind kind = Kind::Identity;
  Matrix explicit_w;         // Kind::Explicit
  OppositionParams block;    // Kind::Block; n1, n2 taken from the opposition section or the groups

  RowStochasticMatrix build(std::size_t n) const;
};

struct TraceOptions {
  bool record_rounds = true;
  int thin = 1;                  // keep every thin-th round
  int max_rounds_recorded = 50;  // rounds 0..max are recorded, padded with the final state
  int weights_every = 1;         // snapshot every m-th topic; 0 keeps only the final matrix
};

struct ScenarioConfig {
  std::string name;
  ModelKind model = ModelKind::Standard;
  std::vector<GroupSpec> groups;
  TruthSequence truth;
  TrustPolicy trust;
  int topics = 1;
  std::uint64_t seed = 1;
  int replications = 1;
  InitialWeights initial_w;
  IterationOptions tolerances;
  TraceOptions trace;
  double wisdom_eps = 0.25;
  double tail_fraction = 0.2;

  LambdaSchedule schedule;   // demarzo
  std::size_t n1 = 0;        // opposition side sizes
  std::size_t n2 = 0;
  ConformityParams conformity;
  HomophilyParams homophily;

  nlohmann::json source;     // the document this was parsed from

  std::size_t n() const { return population_size(groups); }
};

/// Parses and validates, including cross-field rules. Throws ConfigInvalid
/// with the offending key in the message.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// FNV-1a over the canonical (sorted-key) serialization.
std::uint64_t config_hash(const nlohmann::json& doc);

}  // namespace trustdyn
