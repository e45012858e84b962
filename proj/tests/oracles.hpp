#pragma once

// Slow, independent reference computations used only by the tests.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix random_stochastic(std::mt19937_64& gen, int n, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = u(gen) < zero_prob ? 0.0 : u(gen);
    if (m.row(i).sum() == 0.0) m(i, i) = 1.0;
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

// Boolean reachability: column j is positive in W^p iff every i reaches j in exactly p steps.
inline std::vector<std::vector<bool>> bool_power_naive(const Matrix& w, int p) {
  const int n = static_cast<int>(w.rows());
  std::vector<std::vector<bool>> cur(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) cur[i][i] = true;
  for (int s = 0; s < p; ++s) {
    std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (cur[i][k])
          for (int j = 0; j < n; ++j)
            if (w(k, j) > 0.0) next[i][j] = true;
    cur = std::move(next);
  }
  return cur;
}

inline std::optional<int> positive_column_naive(const Matrix& w, int max_power) {
  const int n = static_cast<int>(w.rows());
  std::optional<int> best;
  for (int p = 1; p <= max_power; ++p) {
    const auto b = bool_power_naive(w, p);
    for (int j = 0; j < n; ++j) {
      bool all = true;
      for (int i = 0; i < n && all; ++i) all = b[i][j];
      if (all && (!best || j < *best)) best = j;
    }
  }
  return best;
}

// Left unit eigenvector from the general eigen-solver.
inline Vector left_eigen_unit(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m.transpose());
  int at = 0;
  double best = 1e300;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double d = std::abs(es.eigenvalues()(i) - std::complex<double>(1.0, 0.0));
    if (d < best) best = d, at = i;
  }
  Vector v = es.eigenvectors().col(at).real();
  return v / v.sum();
}

// Composite Simpson rule on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals = 20000) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double normal_pdf(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

// Roots of a real polynomial with coefficients c0 + c1 x + ... via the companion matrix.
inline std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
  const int deg = static_cast<int>(c.size()) - 1;
  Matrix comp = Matrix::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  Eigen::EigenSolver<Matrix> es(comp);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < deg; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Max distance after greedily pairing each expected value with the nearest unused actual value.
inline double match_error(std::vector<std::complex<double>> actual, const std::vector<std::complex<double>>& expected) {
  double worst = 0.0;
  for (const auto& e : expected) {
    std::size_t at = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < actual.size(); ++i)
      if (std::abs(actual[i] - e) < best) best = std::abs(actual[i] - e), at = i;
    worst = std::max(worst, best);
    actual.erase(actual.begin() + static_cast<long>(at));
  }
  return worst;
}

}  // namespace oracle
