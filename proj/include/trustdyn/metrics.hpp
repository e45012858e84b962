#pragma once

#include <optional>
#include <vector>

#include "trustdyn/trace.hpp"

namespace trustdyn {

/// |b - mu| < eps (strict, so eps = 0 never holds).
bool is_eps_wise(double b, double mu, double eps);

struct TopicWisdom {
  int topic = 1;
  double mu = 0.0;
  std::vector<std::size_t> truthful_at_start;  // within eps of mu at round 0
  std::vector<std::size_t> eps_wise;           // within eps of mu at the limit
  std::optional<double> consensus_value;
  std::optional<double> abs_offset;            // |consensus - mu| when consensus
  double mean_offset = 0.0;                    // mean(limit) - mu
  bool all_wise = false;
};

struct WisdomReport {
  double eps = 0.0;
  std::vector<TopicWisdom> topics;
  double fraction_full_wisdom = 0.0;
  int tail_window = 0;            // number of trailing topics in the tail statistics
  double mean_abs_offset_tail = 0.0;
  double mean_offset_tail = 0.0;  // signed
};

/// Per-topic wisdom and aggregate tail statistics. The tail covers the last
/// `tail_fraction` of topics (at least one).
WisdomReport wisdom_report(const SimulationTrace& trace, double eps, double tail_fraction = 0.2);

}  // namespace trustdyn
