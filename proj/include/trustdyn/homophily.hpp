#pragma once

#include <optional>
#include <vector>

#include "trustdyn/degroot.hpp"
#include "trustdyn/trust.hpp"

namespace trustdyn {

struct HomophilyParams {
  double eta_H = 0.25;    // similarity radius
  double delta_H = 0.02;  // within-topic similarity increment, > 0
  double eta_T = 0.25;    // truth radius
  double delta_T = 1.0;   // cross-topic truth increment
  TFunction t_function = TFunction::ConstantOne;
  AdjustmentTime tau = AdjustmentTime::InitialBeliefs;
  double belief_tol = 1e-10;
  double weight_tol = 1e-10;
  int max_rounds = 10000;
  std::optional<double> cluster_gap;  // defaults to eta_H

  void validate() const;
  TrustPolicy truth_policy() const { return {eta_T, delta_T, tau, t_function}; }
  double gap() const { return cluster_gap.value_or(eta_H); }
};

using Partition = std::vector<std::vector<std::size_t>>;

struct TopicRunResult {
  Vector beliefs;             // beliefs when the inner loop stopped
  RowStochasticMatrix weights_limit = RowStochasticMatrix::identity(1);
  bool beliefs_converged = false;
  bool weights_converged = false;
  int rounds_used = 0;
  Partition clusters;

  bool converged() const { return beliefs_converged && weights_converged; }
};

/// W_ij + delta_H for every j with |b_j - b_i| < eta_H (the diagonal always
/// qualifies), then row normalization.
RowStochasticMatrix homophily_adjust(const RowStochasticMatrix& w, const Vector& b, double eta_H, double delta_H);

/// One topic: repeat { W <- homophily_adjust(W, b); b <- W b } until both the
/// beliefs and the weights stop moving, or the round cap is hit.
TopicRunResult run_topic_homophily(const RowStochasticMatrix& w0, const Vector& b0, double mu_k,
                                   const HomophilyParams& params, const RoundObserver& observer = {});

/// Truth increments (eta_T, delta_T, T) applied to the limiting within-topic weights.
RowStochasticMatrix truth_adjust_between_topics(const RowStochasticMatrix& w_limit, const TruthfulSet& truthful,
                                                const HomophilyParams& params);

/// Sorts beliefs and cuts wherever adjacent values are at least `gap` apart.
/// Clusters come out in increasing belief order; members are agent indices.
Partition cluster_detect(const Vector& beliefs, double gap);

}  // namespace trustdyn
