#include "trustdyn/trust.hpp"

#include <algorithm>
#include <cmath>

namespace trustdyn {

bool TruthfulSet::contains(std::size_t j) const {
  return std::binary_search(members.begin(), members.end(), j);
}

TruthfulSet truthful_set(const Vector& b_tau, double mu, double eta, int topic,
                         AdjustmentTime reference) {
  if (!(eta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be >= 0");
  TruthfulSet out{topic, {}, reference};
  for (Eigen::Index j = 0; j < b_tau.size(); ++j) {
    if (std::abs(b_tau(j) - mu) < eta) out.members.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

RowStochasticMatrix adjust_weights(const RowStochasticMatrix& w, const TruthfulSet& truthful,
                                   const TrustPolicy& policy) {
  policy.validate();
  const std::size_t n = w.size();
  const double increment = policy.delta * policy.multiplier(truthful.members.size(), n);
  if (truthful.empty() || increment == 0.0) return w;

  Matrix raw = w.matrix();
  for (std::size_t j : truthful.members) {
    if (j >= n) throw Error(ErrorKind::DimensionMismatch, "truthful agent index out of range");
    raw.col(static_cast<Eigen::Index>(j)).array() += increment;
  }
  return normalize_rows(raw);
}

std::vector<double> geometric_pmf(double p, int horizon) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must lie in [0, 1]");
  std::vector<double> pmf;
  pmf.reserve(static_cast<std::size_t>(std::max(horizon, 0)));
  double miss = 1.0;
  for (int v = 1; v <= horizon; ++v) {
    pmf.push_back(miss * p);
    miss *= 1.0 - p;
  }
  return pmf;
}

FirstSuccessStats first_success(const std::vector<TruthfulSet>& sets, std::optional<double> p,
                                int pmf_horizon, bool require_success) {
  if (sets.empty()) throw Error(ErrorKind::InvalidArgument, "no topics simulated");
  FirstSuccessStats out;
  std::size_t hits = 0;
  for (const auto& s : sets) {
    if (s.empty()) continue;
    ++hits;
    if (!out.r || s.topic < *out.r) out.r = s.topic;
  }
  if (!out.r) {
    if (require_success) {
      throw Error(ErrorKind::NoSuccess,
                  "no truthful agent within " + std::to_string(sets.size()) + " topics");
    }
    out.censored = true;
  }
  out.p_eta = p.value_or(static_cast<double>(hits) / static_cast<double>(sets.size()));
  out.pmf = geometric_pmf(out.p_eta, pmf_horizon);
  return out;
}

double at_least_one_probability(const std::vector<double>& per_agent) {
  double none = 1.0;
  for (double q : per_agent) none *= 1.0 - q;
  return 1.0 - none;
}

}  // namespace trustdyn
