#pragma once

#include <optional>
#include <vector>

#include "trustdyn/core.hpp"

namespace trustdyn {

/// Agents whose reference belief (initial or limiting) lay strictly within
/// eta of the revealed truth for one topic. Indices are 0-based and sorted.
struct TruthfulSet {
  int topic = 1;
  std::vector<std::size_t> members;
  AdjustmentTime reference = AdjustmentTime::InitialBeliefs;

  bool contains(std::size_t j) const;
  bool empty() const { return members.empty(); }
};

TruthfulSet truthful_set(const Vector& b_tau, double mu, double eta, int topic = 1,
                         AdjustmentTime reference = AdjustmentTime::InitialBeliefs);

/// Adds delta * T(|N|) to every column j in N (all rows), then renormalizes
/// once. Returns the input unchanged when the increment is zero.
RowStochasticMatrix adjust_weights(const RowStochasticMatrix& w, const TruthfulSet& truthful,
                                   const TrustPolicy& policy);

struct FirstSuccessStats {
  std::optional<int> r;       // first topic with a nonempty truthful set
  double p_eta = 0.0;
  std::vector<double> pmf;    // pmf[v-1] = (1-p)^(v-1) p
  bool censored = false;      // no truthful event within the horizon
};

/// Geometric law of the first truthful topic.
std::vector<double> geometric_pmf(double p, int horizon);

/// First-success statistics over a per-topic sequence of truthful sets.
/// With no p supplied, p is estimated as the fraction of topics with a
/// truthful event. Throws NoSuccess when `require_success` is set and no
/// topic had one; otherwise the result is marked censored.
FirstSuccessStats first_success(const std::vector<TruthfulSet>& sets, std::optional<double> p = {},
                                int pmf_horizon = 20, bool require_success = false);

/// p_eta = 1 - prod_i (1 - P_i), the chance that at least one agent is truthful.
double at_least_one_probability(const std::vector<double>& per_agent);

}  // namespace trustdyn
