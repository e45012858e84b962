#pragma once

#include <vector>

#include "trustdyn/beliefs.hpp"
#include "trustdyn/core.hpp"

namespace trustdyn {

/// Variance-minimizing weights for averaging independent unbiased signals:
/// w_j = (1/sigma_j^2) / sum_l (1/sigma_l^2).
Vector optimal_weights(const Vector& variances);

/// Var[sum_j w_j X_j] = sum_j w_j^2 sigma_j^2 for independent X_j.
double combined_variance(const Vector& weights, const Vector& variances);

/// Total weight mass per group under the truth-increment heuristic:
/// mass_g proportional to count_g * Pr[|b - mu| < eta].
std::vector<double> heuristic_weight_mass(const std::vector<GroupSpec>& groups, double eta,
                                          double mu = 0.0);

/// Total weight mass per group under optimal_weights.
std::vector<double> optimal_weight_mass(const std::vector<GroupSpec>& groups);

struct WeightPrediction {
  Vector lambda;                   // per agent, sums to 1
  std::vector<double> group_mass;  // lambda summed within each group
  double predicted_mean_offset = 0.0;
  double predicted_variance = 0.0; // sum_j lambda_j^2 sigma_j^2
};

/// Long-run influence weights of the endogenous-trust model with T > 0:
/// proportional to each agent's chance of being within eta of the truth when
/// judged on initial beliefs, uniform 1/n when judged on limiting beliefs.
WeightPrediction predict_limiting(const std::vector<GroupSpec>& groups, double eta,
                                  AdjustmentTime tau, double mu = 0.0);

}  // namespace trustdyn
