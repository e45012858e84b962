#include "trustdyn/homophily.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trustdyn {

void HomophilyParams::validate() const {
  if (!(delta_H > 0.0)) throw Error(ErrorKind::ConfigInvalid, "delta_H must be > 0");
  if (!(eta_H >= 0.0) || !(eta_T >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "radii must be >= 0");
  if (!(delta_T > 0.0)) throw Error(ErrorKind::ConfigInvalid, "delta_T must be > 0");
  if (!(belief_tol > 0.0) || !(weight_tol > 0.0)) throw Error(ErrorKind::ConfigInvalid, "tolerances must be > 0");
  if (max_rounds < 1) throw Error(ErrorKind::ConfigInvalid, "max_rounds must be >= 1");
  if (cluster_gap && !(*cluster_gap > 0.0)) throw Error(ErrorKind::ConfigInvalid, "cluster gap must be > 0");
}

RowStochasticMatrix homophily_adjust(const RowStochasticMatrix& w, const Vector& b, double eta_H, double delta_H) {
  const auto n = static_cast<Eigen::Index>(w.size());
  if (b.size() != n) throw Error(ErrorKind::DimensionMismatch, "beliefs and weights differ in size");
  Matrix raw = w.matrix();
  for (Eigen::Index i = 0; i < n; ++i) {
    raw(i, i) += delta_H;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && std::abs(b(j) - b(i)) < eta_H) raw(i, j) += delta_H;
    }
  }
  return normalize_rows(raw);
}

TopicRunResult run_topic_homophily(const RowStochasticMatrix& w0, const Vector& b0, double /*mu_k*/,
                                   const HomophilyParams& params, const RoundObserver& observer) {
  params.validate();
  if (b0.size() != static_cast<Eigen::Index>(w0.size())) {
    throw Error(ErrorKind::DimensionMismatch, "beliefs and weights differ in size");
  }
  TopicRunResult r;
  r.beliefs = b0;
  RowStochasticMatrix w = w0;
  if (observer) observer(0, r.beliefs);
  for (int t = 0; t < params.max_rounds; ++t) {
    RowStochasticMatrix next_w = homophily_adjust(w, r.beliefs, params.eta_H, params.delta_H);
    Vector next_b = next_w.matrix() * r.beliefs;
    const double belief_change = (next_b - r.beliefs).cwiseAbs().maxCoeff();
    const double weight_change = (next_w.matrix() - w.matrix()).cwiseAbs().maxCoeff();
    w = std::move(next_w);
    r.beliefs.swap(next_b);
    r.rounds_used = t + 1;
    if (observer) observer(t + 1, r.beliefs);
    r.beliefs_converged = belief_change < params.belief_tol;
    r.weights_converged = weight_change < params.weight_tol;
    if (r.beliefs_converged && r.weights_converged) break;
  }
  r.weights_limit = std::move(w);
  r.clusters = cluster_detect(r.beliefs, params.gap());
  return r;
}

RowStochasticMatrix truth_adjust_between_topics(const RowStochasticMatrix& w_limit, const TruthfulSet& truthful,
                                                const HomophilyParams& params) {
  return adjust_weights(w_limit, truthful, params.truth_policy());
}

Partition cluster_detect(const Vector& beliefs, double gap) {
  if (!(gap > 0.0)) throw Error(ErrorKind::InvalidArgument, "gap must be > 0");
  const auto n = static_cast<std::size_t>(beliefs.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return beliefs(static_cast<Eigen::Index>(l)) < beliefs(static_cast<Eigen::Index>(r));
  });
  Partition out;
  for (std::size_t k = 0; k < n; ++k) {
    const double here = beliefs(static_cast<Eigen::Index>(order[k]));
    if (k == 0 || here - beliefs(static_cast<Eigen::Index>(order[k - 1])) >= gap) out.emplace_back();
    out.back().push_back(order[k]);
  }
  return out;
}

}  // namespace trustdyn
