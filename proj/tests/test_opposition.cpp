#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "trustdyn/opposition.hpp"

using namespace trustdyn;

namespace {

OppositionParams fig_params(double b) { return OppositionParams::from_b(10, 10, b, 0.025); }

// Power iteration on A^T, scaled by the unit condition n1 x - n2 y = 1.
Vector influence_by_power(const Matrix& a, const Vector& sign) {
  Vector s = Vector::Constant(a.rows(), 1.0);
  for (int it = 0; it < 20000; ++it) {
    s = a.transpose() * s;
    s /= s.cwiseAbs().sum();
  }
  return s / sign.dot(s);
}

double det_shift(const Matrix& a, double z) {
  return (a - z * Matrix::Identity(a.rows(), a.cols())).determinant();
}

}  // namespace

TEST_CASE("build_A flips cross-side entries only") {
  Matrix raw(2, 2);
  raw << 0.7, 0.3, 0.4, 0.6;
  const RowStochasticMatrix w(raw);
  Matrix expected(2, 2);
  expected << 0.7, -0.3, -0.4, 0.6;
  CHECK((build_A(w, OppositionStructure::blocks(1, 1)) - expected).norm() == 0.0);

  OppositionStructure all_a;
  all_a.side.assign(2, Side::A);
  CHECK(build_A(w, all_a) == raw);

  const auto p = fig_params(0.05);
  const Matrix a = build_A(block_trust_matrix(p), OppositionStructure::blocks(10, 10));
  CHECK(a(0, 1) == doctest::Approx(p.a));
  CHECK(a(0, 15) == doctest::Approx(-p.b));
  CHECK(a(15, 0) == doctest::Approx(-p.c));
  CHECK(a(15, 16) == doctest::Approx(p.d));
  for (Eigen::Index i = 0; i < a.rows(); ++i) CHECK(a.row(i).cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(build_A(w, OppositionStructure::blocks(2, 1)), Error);
}

TEST_CASE("closed form agrees with a power-iteration oracle") {
  const auto f = OppositionStructure::blocks(10, 10);
  for (double b = 0.005; b < 0.1; b += 0.01) {
    const auto p = fig_params(b);
    const Matrix a = build_A(block_trust_matrix(p), f);
    const Vector s = influence_by_power(a, f.sign_vector());
    const auto [x, y] = closed_form_xy(p);
    CHECK(s(0) == doctest::Approx(x).epsilon(1e-8));
    CHECK(s(19) == doctest::Approx(y).epsilon(1e-8));
    const auto pol = polarization_limit(a, f, Vector::Zero(20));
    CHECK((pol.s - s).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(10 * pol.x - 10 * pol.y == doctest::Approx(1.0));
  }
}

TEST_CASE("closed form reference values") {
  auto [x, y] = closed_form_xy(fig_params(0.09));
  CHECK(y == doctest::Approx(-0.078260869565217).epsilon(1e-10));
  CHECK(x == doctest::Approx(0.021739130434783).epsilon(1e-10));
  CHECK(10 * x + 10 * y == doctest::Approx(-0.565217391304348).epsilon(1e-10));

  std::tie(x, y) = closed_form_xy(fig_params(0.025));
  CHECK(y == doctest::Approx(-0.05));
  CHECK(x == doctest::Approx(0.05));
  CHECK(std::abs(10 * x + 10 * y) < 1e-14);

  std::tie(x, y) = closed_form_xy(fig_params(0.0));
  CHECK(y == 0.0);
  CHECK(x == doctest::Approx(0.1));

  OppositionParams bad = OppositionParams::from_b(1, 1, 0.0, 0.0);
  bad.d = 1.0;
  CHECK_THROWS_AS(closed_form_xy(bad), Error);
}

TEST_CASE("|y| grows with d and with b") {
  double prev = -1.0;
  for (double b = 0.0; b < 0.1; b += 0.005) {
    const double y = std::abs(closed_form_xy(fig_params(b)).second);
    CHECK(y > prev);
    prev = y;
  }
  prev = -1.0;
  for (double c = 0.09; c > 0.0; c -= 0.01) {  // smaller c means larger d
    const double y = std::abs(closed_form_xy(OppositionParams::from_b(10, 10, 0.05, c)).second);
    CHECK(y > prev);
    prev = y;
  }
}

TEST_CASE("polarization limits form an opposite pair") {
  const auto f = OppositionStructure::blocks(10, 10);
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (double b : {0.01, 0.04, 0.07}) {
    const auto p = fig_params(b);
    const Matrix a = build_A(block_trust_matrix(p), f);
    const double mu = 0.8;
    auto pol = polarization_limit(a, f, Vector::Constant(20, mu));
    CHECK(pol.limit_b == -pol.limit_a);
    CHECK(pol.limit_a == doctest::Approx(pol.coefficient * mu));
    CHECK(pol.max_iteration_gap < 1e-8);

    Vector b0(20);
    for (int i = 0; i < 20; ++i) b0(i) = nd(gen);
    pol = polarization_limit(a, f, b0);
    CHECK(pol.max_iteration_gap < 1e-8);
    CHECK(pol.s.cwiseAbs().sum() == doctest::Approx(1.0));
    for (int i = 0; i < 10; ++i) CHECK(pol.s(i) > 0.0);
    for (int i = 10; i < 20; ++i) CHECK(pol.s(i) < 0.0);

    Vector cur = b0;
    const double bound = b0.cwiseAbs().maxCoeff();
    for (int t = 0; t < 200; ++t) {
      cur = a * cur;
      CHECK(cur.cwiseAbs().maxCoeff() <= bound + 1e-12);
    }
  }
}

TEST_CASE("symmetric opposition drives both sides to zero") {
  const auto f = OppositionStructure::blocks(10, 10);
  const auto pol = polarization_limit(build_A(block_trust_matrix(fig_params(0.025)), f), f, Vector::Constant(20, 1.0));
  CHECK(std::abs(pol.coefficient) < 1e-10);
  CHECK(std::abs(pol.iterated.beliefs.maxCoeff()) < 1e-8);
}

TEST_CASE("side A ends closer to truth whenever b < c") {
  for (double b = 0.0; b < 0.1; b += 0.0025) {
    const auto [x, y] = closed_form_xy(fig_params(b));
    const double coef = 10 * x + 10 * y;
    CHECK((coef > 0.0) == (b < 0.025 - 1e-12));
    CHECK((std::abs(coef - 1.0) < std::abs(-coef - 1.0)) == (coef > 0.0));
  }
}

TEST_CASE("spectral condition failure names the eigenvalues") {
  Matrix a(2, 2);
  a << 0.0, -1.0, -1.0, 0.0;  // eigenvalues +1 and -1
  try {
    polarization_limit(a, OppositionStructure::blocks(1, 1), Vector::Ones(2));
    FAIL("expected SpectralConditionFailed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpectralConditionFailed);
    CHECK(std::string(e.what()).find("-1") != std::string::npos);
  }
}

TEST_CASE("single-agent side A spectrum") {
  OppositionParams p;
  p.n1 = 1;
  p.n2 = 2;
  p.a = 0.5;
  p.b = 0.25;
  p.c = 0.25;
  p.d = 0.375;
  auto r = check_spectrum_n1_equals_1(p);
  CHECK(r.q == doctest::Approx(0.25));
  CHECK(r.max_error < 1e-9);
  CHECK(r.q_off_unit_circle);
  const Matrix a = build_A(block_trust_matrix(p), OppositionStructure::blocks(1, 2));
  CHECK(std::abs(det_shift(a, 1.0)) < 1e-12);
  CHECK(std::abs(det_shift(a, 0.25)) < 1e-12);
  CHECK(std::abs(det_shift(a, 0.0)) < 1e-12);

  p = OppositionParams{1, 1, 0.7, 0.3, 0.4, 0.6};
  r = check_spectrum_n1_equals_1(p);
  CHECK(r.q == doctest::Approx(0.3));
  CHECK(r.numeric.size() == 2);
  CHECK(r.max_error < 1e-9);

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n2 = 1 + trial % 6;
    const double b = u(gen) / static_cast<double>(n2);
    const double c = u(gen);
    p = OppositionParams::from_b(1, n2, b, c);
    r = check_spectrum_n1_equals_1(p);
    CHECK(r.max_error < 1e-7);
    CHECK(r.q_off_unit_circle);
  }

  CHECK_THROWS_AS(check_spectrum_n1_equals_1(fig_params(0.05)), Error);
}

TEST_CASE("grouped adjustment touches the viewer's own side only") {
  const auto p = OppositionParams::from_b(2, 2, 0.2, 0.1);
  const auto w = block_trust_matrix(p);
  const auto f = OppositionStructure::blocks(2, 2);
  TrustPolicy policy;
  policy.delta = 0.5;

  auto out = adjust_weights_grouped(w, TruthfulSet{1, {2, 3}, AdjustmentTime::InitialBeliefs}, policy, f);
  CHECK(out.matrix().row(0) == w.matrix().row(0));
  CHECK(out.matrix().row(1) == w.matrix().row(1));

  out = adjust_weights_grouped(w, TruthfulSet{1, {0}, AdjustmentTime::InitialBeliefs}, policy, f);
  // Row 0: same-side block (a + 0.5, a) rescaled to mass 2a.
  const double scale = 2 * p.a / (2 * p.a + 0.5);
  CHECK(out(0, 0) == doctest::Approx((p.a + 0.5) * scale));
  CHECK(out(0, 1) == doctest::Approx(p.a * scale));
  CHECK(out(0, 2) == p.b);
  CHECK(out(1, 3) == p.b);
  CHECK(out.matrix().row(2) == w.matrix().row(2));

  policy.delta = 1e9;
  out = adjust_weights_grouped(w, TruthfulSet{1, {0, 1}, AdjustmentTime::InitialBeliefs}, policy, f);
  CHECK(out(0, 0) == doctest::Approx(p.a));
  CHECK(out(0, 0) + out(0, 1) == doctest::Approx(1 - 2 * p.b));

  const auto three = OppositionParams::from_b(3, 1, 0.1, 0.2);
  const auto w3 = block_trust_matrix(three);
  out = adjust_weights_grouped(w3, TruthfulSet{1, {1}, AdjustmentTime::InitialBeliefs}, policy,
                               OppositionStructure::blocks(3, 1));
  CHECK(out(0, 1) == doctest::Approx(3 * three.a).epsilon(1e-6));
  CHECK(out(0, 0) < 1e-6);
  CHECK(out(0, 3) == three.b);
}
