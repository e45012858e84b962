#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "trustdyn/beliefs.hpp"
#include "trustdyn/error.hpp"
#include "trustdyn/trust.hpp"

using namespace trustdyn;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

std::vector<std::size_t> members(std::initializer_list<std::size_t> xs) { return xs; }

}  // namespace

TEST_CASE("truthful_set uses a strict radius") {
  const double mu = 1.5, eta = 0.3;
  CHECK(truthful_set(vec({mu, mu + 2 * eta}), mu, eta).members == members({0}));
  CHECK(truthful_set(vec({mu, mu}), mu, 0.0).empty());
  CHECK(truthful_set(vec({0.1, 0.3, 0.9}), 0.0, 0.25).members == members({0}));
  CHECK(truthful_set(vec({0.25, -0.25, 0.2499}), 0.0, 0.25).members == members({2}));
  CHECK_THROWS_AS(truthful_set(vec({0.0}), 0.0, -1.0), Error);
}

TEST_CASE("truthful_set matches a direct comparison oracle") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    Vector b(12);
    for (int i = 0; i < 12; ++i) b(i) = nd(gen);
    const auto got = truthful_set(b, 0.1, 0.4, 3, AdjustmentTime::LimitBeliefs);
    std::vector<std::size_t> expected;
    for (int i = 0; i < 12; ++i)
      if (std::abs(b(i) - 0.1) < 0.4) expected.push_back(static_cast<std::size_t>(i));
    CHECK(got.members == expected);
    CHECK(got.topic == 3);
    CHECK(got.reference == AdjustmentTime::LimitBeliefs);
  }
}

TEST_CASE("adjust_weights examples") {
  TrustPolicy policy;
  policy.delta = 0.3;
  const auto id = RowStochasticMatrix::identity(4);

  const auto same = adjust_weights(id, TruthfulSet{}, policy);
  CHECK(same.matrix() == id.matrix());

  const auto w2 = adjust_weights(id, TruthfulSet{1, {0}, AdjustmentTime::InitialBeliefs}, policy);
  const double d = policy.delta;
  CHECK(w2(0, 0) == doctest::Approx(1.0));
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(w2(i, 0) == doctest::Approx(d / (1 + d)));
    CHECK(w2(i, i) == doctest::Approx(1 / (1 + d)));
  }

  policy.t_function = TFunction::ZeroAtN;
  const auto all = adjust_weights(id, TruthfulSet{1, {0, 1, 2, 3}, AdjustmentTime::LimitBeliefs}, policy);
  CHECK(all.matrix() == id.matrix());
}

TEST_CASE("adjust_weights adds delta * T then renormalizes once") {
  std::mt19937_64 gen(2);
  TrustPolicy policy;
  policy.delta = 0.7;
  policy.t_function = TFunction::NegLogFraction;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(gen() % 6);
    const RowStochasticMatrix w(oracle::random_stochastic(gen, n));
    TruthfulSet set;
    for (int j = 0; j < n; ++j)
      if (gen() % 2) set.members.push_back(static_cast<std::size_t>(j));
    const auto got = adjust_weights(w, set, policy);
    Matrix raw = w.matrix();
    const double inc = set.empty() ? 0.0 : 0.7 * -std::log(static_cast<double>(set.members.size()) / n);
    for (auto j : set.members) raw.col(static_cast<Eigen::Index>(j)).array() += inc;
    for (int i = 0; i < n; ++i) raw.row(i) /= raw.row(i).sum();
    CHECK((got.matrix() - raw).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("trust adjustments preserve positivity, row equality and frequency order") {
  std::mt19937_64 gen(9);
  TrustPolicy policy;
  policy.delta = 0.2;
  const int n = 6;
  const std::vector<double> hit = {0.9, 0.6, 0.4, 0.2, 0.1, 0.05};
  for (int trial = 0; trial < 20; ++trial) {
    auto w = RowStochasticMatrix::uniform(n);
    std::vector<int> count(n, 0);
    bool positive_kept = true;
    std::optional<std::size_t> first_col;
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 1; k <= 200; ++k) {
      TruthfulSet s{k, {}, AdjustmentTime::InitialBeliefs};
      for (int j = 0; j < n; ++j)
        if (u(gen) < hit[j]) s.members.push_back(static_cast<std::size_t>(j)), ++count[j];
      w = adjust_weights(w, s, policy);
      for (int j = 0; j < n; ++j) positive_kept = positive_kept && w.matrix().col(j).minCoeff() > 0.0;
      for (int i = 1; i < n; ++i) CHECK((w.matrix().row(i) - w.matrix().row(0)).cwiseAbs().maxCoeff() < 1e-15);
      if (!first_col) first_col = has_positive_column(w);
    }
    CHECK(positive_kept);
    CHECK(first_col.has_value());
  }
}

TEST_CASE("monotone trust from an identical start") {
  // Identical history except that agent 0 is truthful strictly more often than agent 1.
  TrustPolicy policy;
  policy.delta = 0.25;
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4;
    auto w = RowStochasticMatrix::uniform(n);
    int c0 = 0, c1 = 0;
    for (int k = 1; k <= 40; ++k) {
      TruthfulSet s{k, {}, AdjustmentTime::InitialBeliefs};
      const bool a = gen() % 3 != 0;
      const bool b = a && gen() % 2 == 0;
      if (a) s.members.push_back(0), ++c0;
      if (b) s.members.push_back(1), ++c1;
      if (gen() % 2) s.members.push_back(3);
      w = adjust_weights(w, s, policy);
    }
    if (c0 > c1) {
      for (int i = 0; i < n; ++i) CHECK(w(i, 0) >= w(i, 1));
    }
  }
}

TEST_CASE("geometric pmf and first_success") {
  const auto pmf = geometric_pmf(0.5, 5);
  CHECK(pmf[0] == doctest::Approx(0.5));
  CHECK(pmf[1] == doctest::Approx(0.25));
  CHECK(pmf[2] == doctest::Approx(0.125));
  double total = 0;
  for (double p : geometric_pmf(0.3, 40)) total += p;
  CHECK(total <= 1.0 + 1e-15);

  std::vector<TruthfulSet> sets = {{1, {2}, AdjustmentTime::InitialBeliefs}, {2, {}, AdjustmentTime::InitialBeliefs}};
  CHECK(*first_success(sets).r == 1);
  CHECK(first_success(sets).p_eta == doctest::Approx(0.5));

  std::vector<TruthfulSet> none = {{1, {}, AdjustmentTime::InitialBeliefs}, {2, {}, AdjustmentTime::InitialBeliefs}};
  const auto censored = first_success(none, 0.2);
  CHECK(censored.censored);
  CHECK_FALSE(censored.r.has_value());
  CHECK_THROWS_AS(first_success(none, 0.2, 20, true), Error);
  CHECK_THROWS_AS(first_success({}), Error);
}

TEST_CASE("large populations make the first topic truthful almost surely") {
  const BeliefDistribution normal = NormalAroundTruth{1.0, std::nullopt};
  const double p1 = prob_within_radius(normal, 0.0, 0.25);
  const std::vector<double> per(200, p1);
  const double p = at_least_one_probability(per);
  CHECK(p > 0.999999);

  const std::vector<GroupSpec> groups = {{200, normal}};
  const SeededRng rng(4);
  int first_topic_hits = 0;
  for (int draw = 0; draw < 2000; ++draw) {
    const auto b = sample_initial(groups, 0.0, rng, draw + 1);
    first_topic_hits += !truthful_set(b, 0.0, 0.25).empty();
  }
  CHECK(first_topic_hits == 2000);
}
