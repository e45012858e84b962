#include "trustdyn/rational.hpp"

namespace trustdyn {

Vector optimal_weights(const Vector& variances) {
  if (variances.size() == 0) throw Error(ErrorKind::InvalidArgument, "no variances given");
  if ((variances.array() <= 0.0).any() || !variances.allFinite()) {
    throw Error(ErrorKind::NonPositiveVariance, "all variances must be positive and finite");
  }
  Vector precision = variances.cwiseInverse();
  return precision / precision.sum();
}

double combined_variance(const Vector& weights, const Vector& variances) {
  if (weights.size() != variances.size()) throw Error(ErrorKind::DimensionMismatch, "size mismatch");
  return (weights.array().square() * variances.array()).sum();
}

namespace {

std::vector<double> normalized(std::vector<double> v) {
  double total = 0.0;
  for (double x : v) total += x;
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "no group has positive weight mass");
  for (double& x : v) x /= total;
  return v;
}

}  // namespace

std::vector<double> heuristic_weight_mass(const std::vector<GroupSpec>& groups, double eta, double mu) {
  if (!(eta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be >= 0");
  std::vector<double> mass;
  for (const auto& g : groups) {
    mass.push_back(static_cast<double>(g.count) * prob_within_radius(g.distribution, mu, eta));
  }
  return normalized(std::move(mass));
}

std::vector<double> optimal_weight_mass(const std::vector<GroupSpec>& groups) {
  std::vector<double> mass;
  for (const auto& g : groups) {
    const double v = variance_of(g.distribution);
    if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveVariance, "group with zero variance");
    mass.push_back(static_cast<double>(g.count) / v);
  }
  return normalized(std::move(mass));
}

WeightPrediction predict_limiting(const std::vector<GroupSpec>& groups, double eta, AdjustmentTime tau,
                                  double mu) {
  const std::size_t n = population_size(groups);
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty population");

  std::vector<double> per_member;
  for (const auto& g : groups) {
    per_member.push_back(tau == AdjustmentTime::InitialBeliefs ? prob_within_radius(g.distribution, mu, eta)
                                                               : 1.0);
  }

  WeightPrediction out;
  out.lambda.resize(static_cast<Eigen::Index>(n));
  Eigen::Index i = 0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t m = 0; m < groups[g].count; ++m) out.lambda(i++) = per_member[g];
  const double total = out.lambda.sum();
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "no agent can ever be truthful");
  out.lambda /= total;

  i = 0;
  for (const auto& g : groups) {
    double mass = 0.0;
    for (std::size_t m = 0; m < g.count; ++m, ++i) {
      const double l = out.lambda(i);
      mass += l;
      out.predicted_mean_offset += l * mean_offset(g.distribution, mu);
      out.predicted_variance += l * l * variance_of(g.distribution);
    }
    out.group_mass.push_back(mass);
  }
  return out;
}

}  // namespace trustdyn
