#include "trustdyn/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace trustdyn {

bool is_eps_wise(double b, double mu, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be >= 0");
  return std::abs(b - mu) < eps;
}

WisdomReport wisdom_report(const SimulationTrace& trace, double eps, double tail_fraction) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be >= 0");
  WisdomReport rep;
  rep.eps = eps;
  std::size_t wise_topics = 0;
  for (const auto& t : trace.topics) {
    TopicWisdom w;
    w.topic = t.topic;
    w.mu = t.mu;
    for (Eigen::Index i = 0; i < t.initial.size(); ++i)
      if (is_eps_wise(t.initial(i), t.mu, eps)) w.truthful_at_start.push_back(static_cast<std::size_t>(i));
    for (Eigen::Index i = 0; i < t.limit.size(); ++i)
      if (!t.diverged && is_eps_wise(t.limit(i), t.mu, eps)) w.eps_wise.push_back(static_cast<std::size_t>(i));
    w.consensus_value = t.consensus_value;
    if (t.consensus_value) w.abs_offset = std::abs(*t.consensus_value - t.mu);
    w.mean_offset = t.offset();
    w.all_wise = t.limit.size() > 0 && w.eps_wise.size() == static_cast<std::size_t>(t.limit.size());
    if (w.all_wise) ++wise_topics;
    rep.topics.push_back(std::move(w));
  }
  const std::size_t k = rep.topics.size();
  if (k == 0) return rep;
  rep.fraction_full_wisdom = static_cast<double>(wise_topics) / static_cast<double>(k);
  const auto window = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(k))), 1, k);
  rep.tail_window = static_cast<int>(window);
  double abs_sum = 0.0;
  double signed_sum = 0.0;
  for (std::size_t i = k - window; i < k; ++i) {
    signed_sum += rep.topics[i].mean_offset;
    abs_sum += std::abs(rep.topics[i].mean_offset);
  }
  rep.mean_offset_tail = signed_sum / static_cast<double>(window);
  rep.mean_abs_offset_tail = abs_sum / static_cast<double>(window);
  return rep;
}

}  // namespace trustdyn
