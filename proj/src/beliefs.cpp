#include "trustdyn/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trustdyn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double overlap(double a_lo, double a_hi, double b_lo, double b_hi) {
  return std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
}

// Pr[lo < Z < hi] for standard normal Z, using erfc on the tails for accuracy.
double normal_mass(double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (lo >= 0.0) return 0.5 * (std::erfc(lo / std::numbers::sqrt2) - std::erfc(hi / std::numbers::sqrt2));
  if (hi <= 0.0) return normal_mass(-hi, -lo);
  return 1.0 - normal_mass(hi, INFINITY) - normal_mass(-lo, INFINITY);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void GroupSpec::validate() const {
  if (count < 1) throw Error(ErrorKind::ConfigInvalid, "group count must be >= 1");
  std::visit(Overloaded{
                 [](const PointTruth&) {},
                 [](const NormalAroundTruth& d) {
                   if (!(d.variance > 0.0)) throw Error(ErrorKind::ConfigInvalid, "variance must be > 0");
                   if (d.truncate_radius && !(*d.truncate_radius > 0.0))
                     throw Error(ErrorKind::ConfigInvalid, "truncation radius must be > 0");
                 },
                 [](const BiasedNormal& d) {
                   if (!(d.variance > 0.0)) throw Error(ErrorKind::ConfigInvalid, "variance must be > 0");
                 },
                 [](const UniformInterval& d) {
                   if (!(d.lo < d.hi)) throw Error(ErrorKind::ConfigInvalid, "uniform interval needs lo < hi");
                 },
                 [](const NeverTruthful& d) {
                   if (!(d.lo < d.hi)) throw Error(ErrorKind::ConfigInvalid, "interval needs lo < hi");
                 },
             },
             distribution);
}

std::size_t population_size(const std::vector<GroupSpec>& groups) {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.count;
  return n;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeededRng::Stream SeededRng::stream(std::uint64_t topic, std::uint64_t agent, std::uint64_t purpose) const {
  std::uint64_t key = splitmix64(seed_);
  key = splitmix64(key ^ topic);
  key = splitmix64(key ^ (agent * 0x632be59bd9b4e019ULL));
  key = splitmix64(key ^ (purpose * 0x85157af5ULL));
  return Stream(key);
}

// The standard <random> distributions are implementation-defined; these
// transforms keep draws identical across standard libraries.
double SeededRng::Stream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::Stream::standard_normal() {
  // Box-Muller; u1 in (0, 1] to keep the log finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double draw(const BeliefDistribution& dist, double mu, SeededRng::Stream& stream) {
  return std::visit(
      Overloaded{
          [&](const PointTruth&) { return mu; },
          [&](const NormalAroundTruth& d) {
            const double sigma = std::sqrt(d.variance);
            if (!d.truncate_radius) return mu + sigma * stream.standard_normal();
            for (;;) {
              const double e = sigma * stream.standard_normal();
              if (std::abs(e) < *d.truncate_radius) return mu + e;
            }
          },
          [&](const BiasedNormal& d) { return mu + d.bias + std::sqrt(d.variance) * stream.standard_normal(); },
          [&](const UniformInterval& d) { return stream.uniform(d.lo, d.hi); },
          [&](const NeverTruthful& d) { return mu + stream.uniform(d.lo, d.hi); },
      },
      dist);
}

Vector sample_initial(const std::vector<GroupSpec>& groups, double mu_k, const SeededRng& rng, int topic) {
  if (groups.empty()) throw Error(ErrorKind::InvalidArgument, "no groups given");
  Vector b(static_cast<Eigen::Index>(population_size(groups)));
  Eigen::Index i = 0;
  for (const auto& g : groups) {
    for (std::size_t m = 0; m < g.count; ++m, ++i) {
      auto s = rng.stream(static_cast<std::uint64_t>(topic), static_cast<std::uint64_t>(i));
      b(i) = draw(g.distribution, mu_k, s);
    }
  }
  return b;
}

double prob_within_radius(const BeliefDistribution& dist, double mu, double eta) {
  if (!(eta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be >= 0");
  return std::visit(
      Overloaded{
          [&](const PointTruth&) { return eta > 0.0 ? 1.0 : 0.0; },
          [&](const NormalAroundTruth& d) {
            const double sigma = std::sqrt(d.variance);
            if (!d.truncate_radius) return normal_mass(-eta / sigma, eta / sigma);
            const double r = std::min(eta, *d.truncate_radius) / sigma;
            const double whole = *d.truncate_radius / sigma;
            return normal_mass(-r, r) / normal_mass(-whole, whole);
          },
          [&](const BiasedNormal& d) {
            const double sigma = std::sqrt(d.variance);
            return normal_mass((-eta - d.bias) / sigma, (eta - d.bias) / sigma);
          },
          [&](const UniformInterval& d) { return overlap(mu - eta, mu + eta, d.lo, d.hi) / (d.hi - d.lo); },
          [&](const NeverTruthful& d) { return overlap(-eta, eta, d.lo, d.hi) / (d.hi - d.lo); },
      },
      dist);
}

double mean_offset(const BeliefDistribution& dist, double mu) {
  return std::visit(Overloaded{
                        [](const PointTruth&) { return 0.0; },
                        [](const NormalAroundTruth&) { return 0.0; },
                        [](const BiasedNormal& d) { return d.bias; },
                        [&](const UniformInterval& d) { return 0.5 * (d.lo + d.hi) - mu; },
                        [](const NeverTruthful& d) { return 0.5 * (d.lo + d.hi); },
                    },
                    dist);
}

double variance_of(const BeliefDistribution& dist) {
  return std::visit(
      Overloaded{
          [](const PointTruth&) { return 0.0; },
          [](const NormalAroundTruth& d) {
            if (!d.truncate_radius) return d.variance;
            // Symmetric truncation at +-r sigma.
            const double sigma = std::sqrt(d.variance);
            const double r = *d.truncate_radius / sigma;
            const double pdf = std::exp(-0.5 * r * r) / std::sqrt(2.0 * std::numbers::pi);
            return d.variance * (1.0 - 2.0 * r * pdf / normal_mass(-r, r));
          },
          [](const BiasedNormal& d) { return d.variance; },
          [](const UniformInterval& d) { return (d.hi - d.lo) * (d.hi - d.lo) / 12.0; },
          [](const NeverTruthful& d) { return (d.hi - d.lo) * (d.hi - d.lo) / 12.0; },
      },
      dist);
}

}  // namespace trustdyn
