#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "trustdyn/degroot.hpp"
#include "trustdyn/error.hpp"

using namespace trustdyn;

namespace {

RowStochasticMatrix absorbing2() {
  Matrix w(2, 2);
  w << 1, 0, 0.5, 0.5;
  return RowStochasticMatrix(w);
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Random matrix with a strictly positive first column, hence consensus inducing.
Matrix consensus_matrix(std::mt19937_64& gen, int n) {
  Matrix w = oracle::random_stochastic(gen, n, 0.5);
  w.col(0).array() += 0.05;
  return normalize_rows(w).matrix();
}

}  // namespace

TEST_CASE("step examples") {
  CHECK(step(RowStochasticMatrix::identity(2), vec({3, 7})) == vec({3, 7}));
  CHECK(step(RowStochasticMatrix::uniform(2), vec({0, 1})).isApprox(vec({0.5, 0.5})));
  const double mu = 2.0, z = -1.0;
  CHECK(step(absorbing2(), vec({mu, z})).isApprox(vec({mu, 0.5 * mu + 0.5 * z})));
  CHECK_THROWS_AS(step(absorbing2(), vec({1, 2, 3})), Error);
}

TEST_CASE("iterate_to_limit examples") {
  const auto r = iterate_to_limit(absorbing2(), vec({2.0, -1.0}));
  CHECK(r.converged);
  CHECK(r.is_consensus);
  CHECK(*r.consensus_value == doctest::Approx(2.0).epsilon(1e-9));

  const auto u = iterate_to_limit(RowStochasticMatrix::uniform(4), vec({1, 2, 3, 6}));
  CHECK(u.is_consensus);
  CHECK(*u.consensus_value == doctest::Approx(3.0));
  CHECK(u.rounds_used <= 2);

  const auto id = iterate_to_limit(RowStochasticMatrix::identity(3), vec({1, 2, 3}));
  CHECK(id.converged);
  CHECK_FALSE(id.is_consensus);
  CHECK(id.beliefs == vec({1, 2, 3}));
}

TEST_CASE("iterate_to_limit rejects a non-positive tolerance") {
  IterationOptions o;
  o.tol = 0.0;
  CHECK_THROWS_AS(iterate_to_limit(absorbing2(), vec({1, 2}), o), Error);
}

TEST_CASE("iterate_linear flags divergence instead of throwing") {
  Matrix a(2, 2);
  a << 2, 0, 0, 1;
  const auto r = iterate_linear(a, vec({1, 1}));
  CHECK(r.diverged);
  CHECK_FALSE(r.converged);
  CHECK(r.beliefs.allFinite());
}

TEST_CASE("social_influence examples") {
  const auto u = social_influence(RowStochasticMatrix::uniform(5)).s;
  CHECK((u.array() - 0.2).abs().maxCoeff() < 1e-12);
  const auto s = social_influence(absorbing2()).s;
  CHECK(s(0) == doctest::Approx(1.0));
  CHECK(std::abs(s(1)) < 1e-12);
  // form-A: beta on the diagonal, alpha elsewhere
  const int n = 6;
  const double alpha = 0.07;
  Matrix fa = Matrix::Constant(n, n, alpha);
  fa.diagonal().setConstant(1.0 - (n - 1) * alpha);
  const auto sa = social_influence(RowStochasticMatrix(fa)).s;
  CHECK((sa.array() - 1.0 / n).abs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(social_influence(RowStochasticMatrix::identity(3)), Error);
}

TEST_CASE("social_influence matches the eigen-solver and the iterated limit") {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 8);
    const RowStochasticMatrix w(consensus_matrix(gen, n));
    const Vector s = social_influence(w).s;
    CHECK((s - oracle::left_eigen_unit(w.matrix())).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(s.minCoeff() >= -1e-15);
    CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 100 / 30 + 1; ++k) {
      Vector b0(n);
      for (int i = 0; i < n; ++i) b0(i) = nd(gen);
      const auto lim = iterate_to_limit(w, b0);
      CHECK(lim.is_consensus);
      CHECK(std::abs(*lim.consensus_value - s.dot(b0)) < 1e-8);
    }
  }
}

TEST_CASE("iteration keeps beliefs inside the initial hull") {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 8);
    const RowStochasticMatrix w(oracle::random_stochastic(gen, n, 0.4));
    Vector b0(n);
    for (int i = 0; i < n; ++i) b0(i) = nd(gen);
    const double lo = b0.minCoeff(), hi = b0.maxCoeff();
    bool inside = true;
    iterate_to_limit(w, b0, {}, [&](int, const Vector& b) {
      inside = inside && b.minCoeff() >= lo - 1e-12 && b.maxCoeff() <= hi + 1e-12;
    });
    CHECK(inside);
  }
}

TEST_CASE("form-A eigenvalue lemma on random instances") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 7);
    const double alpha = u(gen), beta = u(gen);
    Matrix a = Matrix::Constant(n, n, alpha);
    a.diagonal().setConstant(beta);
    Eigen::EigenSolver<Matrix> es(a);
    std::vector<std::complex<double>> got;
    for (int i = 0; i < n; ++i) got.push_back(es.eigenvalues()(i));
    std::vector<std::complex<double>> expected(n - 1, beta - alpha);
    expected.push_back(beta + (n - 1) * alpha);
    CHECK(oracle::match_error(got, expected) < 1e-9);
  }
}

TEST_CASE("step_self_weight") {
  const auto w = absorbing2();
  const Vector b = vec({2.0, -1.0});
  CHECK(step_self_weight(w, b, 1.0).isApprox(step(w, b)));
  CHECK((step_self_weight(w, b, 1e-12) - b).cwiseAbs().maxCoeff() < 1e-11);
  CHECK_THROWS_AS(step_self_weight(w, b, 0.0), Error);
  CHECK_THROWS_AS(step_self_weight(w, b, 1.5), Error);
  try {
    step_self_weight(w, b, -0.1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadLambda);
  }
}

TEST_CASE("harmonic self-weight reaches the same limit on the absorbing example") {
  LambdaSchedule h{LambdaSchedule::Kind::Harmonic, 0.0};
  const double mu = 2.0, z = -1.0;
  const auto r = self_weight_limit(absorbing2(), vec({mu, z}), h);
  CHECK(r.is_consensus);
  CHECK(*r.consensus_value == doctest::Approx(mu).epsilon(1e-9));
}

TEST_CASE("spectral schedule product matches round-by-round stepping") {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> nd;
  const std::vector<LambdaSchedule> schedules = {
      {LambdaSchedule::Kind::Harmonic, 0.0},
      {LambdaSchedule::Kind::Constant, 0.3},
      {LambdaSchedule::Kind::Geometric, 0.9},
  };
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 6);
    const RowStochasticMatrix w(consensus_matrix(gen, n));
    Vector b0(n);
    for (int i = 0; i < n; ++i) b0(i) = nd(gen);
    for (const auto& sch : schedules) {
      for (int rounds : {1, 7, 200}) {
        Vector naive = b0;
        for (int t = 0; t < rounds; ++t) naive = step_self_weight(w, naive, sch.at(t));
        const auto spectral = self_weight_product(w, b0, sch, rounds);
        REQUIRE(spectral.has_value());
        CHECK((*spectral - naive).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }
}

TEST_CASE("DeMarzo equivalence with lambda = 1") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd;
  const LambdaSchedule h{LambdaSchedule::Kind::Harmonic, 0.0};
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 8);
    const RowStochasticMatrix w(consensus_matrix(gen, n));
    Vector b0(n);
    for (int i = 0; i < n; ++i) b0(i) = nd(gen);
    const auto plain = iterate_to_limit(w, b0);
    const auto sw = self_weight_limit(w, b0, h);
    CHECK((plain.beliefs - sw.beliefs).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("LambdaSchedule") {
  const LambdaSchedule h{LambdaSchedule::Kind::Harmonic, 0.0};
  CHECK(h.at(0) == 1.0);
  CHECK(h.at(3) == doctest::Approx(0.25));
  CHECK(h.has_divergent_sum());
  const LambdaSchedule g{LambdaSchedule::Kind::Geometric, 0.5};
  CHECK(g.at(2) == doctest::Approx(0.25));
  CHECK_FALSE(g.has_divergent_sum());
  CHECK_THROWS_AS((LambdaSchedule{LambdaSchedule::Kind::Constant, 0.0}.validate()), Error);
  CHECK_THROWS_AS((LambdaSchedule{LambdaSchedule::Kind::Geometric, 1.5}.validate()), Error);
}

TEST_CASE("harmonic limit on a defective matrix") {
  // eigenvalue 0 with a 2x2 Jordan block, plus 0.5 and the unit eigenvalue
  Matrix raw(4, 4);
  raw << 1, 0, 0, 0,
         0, 0, 1, 0,
         1, 0, 0, 0,
         0.5, 0, 0, 0.5;
  const RowStochasticMatrix w(raw);
  const Vector b0 = vec({2.0, -1.0, 3.0, 0.25});
  const auto plain = iterate_to_limit(w, b0);
  const auto h = self_weight_limit(w, b0, {LambdaSchedule::Kind::Harmonic, 0.0});
  CHECK(h.converged);
  CHECK(h.is_consensus);
  CHECK((h.beliefs.array() - 2.0).abs().maxCoeff() < 1e-9);
  CHECK((plain.beliefs - h.beliefs).cwiseAbs().maxCoeff() < 1e-9);
}
