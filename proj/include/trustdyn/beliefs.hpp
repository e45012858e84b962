#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "trustdyn/core.hpp"

namespace trustdyn {

// Initial-belief distributions. Everything except UniformInterval is defined
// relative to the topic's truth mu_k, so the chance of landing within eta of
// the truth does not depend on k.
struct PointTruth {};
struct NormalAroundTruth {
  double variance = 1.0;
  std::optional<double> truncate_radius;  // redraw until |b - mu| < radius
};
struct BiasedNormal {
  double bias = 0.0;
  double variance = 1.0;
};
struct UniformInterval {  // absolute bounds, only valid with a constant truth
  double lo = 0.0;
  double hi = 1.0;
};
struct NeverTruthful {  // uniform on [mu + lo, mu + hi], disjoint from the eta-ball
  double lo = 1.0;
  double hi = 2.0;
};

using BeliefDistribution =
    std::variant<PointTruth, NormalAroundTruth, BiasedNormal, UniformInterval, NeverTruthful>;

struct GroupSpec {
  std::size_t count = 1;
  BeliefDistribution distribution = PointTruth{};

  void validate() const;
};

std::size_t population_size(const std::vector<GroupSpec>& groups);

/// Counter-based random streams: every (seed, topic, agent) triple maps to its
/// own generator, so draws never depend on what else the simulation consumed.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

  class Stream {
   public:
    explicit Stream(std::uint64_t key) : engine_(key) {}
    double uniform01();  // in [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double standard_normal();

   private:
    std::mt19937_64 engine_;
  };

  Stream stream(std::uint64_t topic, std::uint64_t agent, std::uint64_t purpose = 0) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

double draw(const BeliefDistribution& dist, double mu, SeededRng::Stream& stream);

/// Initial beliefs for topic k; agent order follows the group order.
Vector sample_initial(const std::vector<GroupSpec>& groups, double mu_k, const SeededRng& rng,
                      int topic);

/// Pr[|b - mu| < eta] under the distribution (open ball).
double prob_within_radius(const BeliefDistribution& dist, double mu, double eta);

/// E[b] - mu, and Var[b].
double mean_offset(const BeliefDistribution& dist, double mu);
double variance_of(const BeliefDistribution& dist);

double normal_cdf(double x);

}  // namespace trustdyn
