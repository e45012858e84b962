#include "trustdyn/opposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trustdyn {

OppositionStructure OppositionStructure::blocks(std::size_t n1, std::size_t n2) {
  OppositionStructure f;
  f.side.assign(n1, Side::A);
  f.side.insert(f.side.end(), n2, Side::B);
  return f;
}

Vector OppositionStructure::sign_vector() const {
  Vector v(static_cast<Eigen::Index>(side.size()));
  for (std::size_t i = 0; i < side.size(); ++i) v(static_cast<Eigen::Index>(i)) = side[i] == Side::A ? 1.0 : -1.0;
  return v;
}

void OppositionParams::validate(double tol) const {
  if (n1 < 1 || n2 < 1) throw Error(ErrorKind::InvalidArgument, "both sides need at least one agent");
  if (a < 0 || b < 0 || c < 0 || d < 0) throw Error(ErrorKind::InvalidArgument, "block weights must be >= 0");
  const double ra = static_cast<double>(n1) * a + static_cast<double>(n2) * b;
  const double rb = static_cast<double>(n1) * c + static_cast<double>(n2) * d;
  if (std::abs(ra - 1.0) > tol || std::abs(rb - 1.0) > tol) {
    std::ostringstream msg;
    msg << "block rows must sum to 1 (n1 a + n2 b = " << ra << ", n1 c + n2 d = " << rb << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

OppositionParams OppositionParams::from_b(std::size_t n1, std::size_t n2, double b, double c) {
  OppositionParams p;
  p.n1 = n1;
  p.n2 = n2;
  p.b = b;
  p.c = c;
  p.a = (1.0 - static_cast<double>(n2) * b) / static_cast<double>(n1);
  p.d = (1.0 - static_cast<double>(n1) * c) / static_cast<double>(n2);
  return p;
}

RowStochasticMatrix block_trust_matrix(const OppositionParams& p) {
  p.validate();
  const auto n1 = static_cast<Eigen::Index>(p.n1);
  const auto n2 = static_cast<Eigen::Index>(p.n2);
  Matrix w(n1 + n2, n1 + n2);
  w.topLeftCorner(n1, n1).setConstant(p.a);
  w.topRightCorner(n1, n2).setConstant(p.b);
  w.bottomLeftCorner(n2, n1).setConstant(p.c);
  w.bottomRightCorner(n2, n2).setConstant(p.d);
  return RowStochasticMatrix(std::move(w), 1e-10);
}

Matrix build_A(const RowStochasticMatrix& w, const OppositionStructure& f) {
  if (f.size() != w.size()) throw Error(ErrorKind::DimensionMismatch, "structure and matrix sizes differ");
  Matrix a = w.matrix();
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j)
      if (!f.same_side(i, j)) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *= -1.0;
  return a;
}

SpectrumReport spectrum(const Matrix& a, double tol) {
  Eigen::EigenSolver<Matrix> es(a, false);
  SpectrumReport r;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r.eigenvalues.push_back(es.eigenvalues()(i));
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
            [](auto l, auto rr) { return std::abs(l) > std::abs(rr); });
  int on_circle = 0;
  int at_one = 0;
  for (auto ev : r.eigenvalues) {
    if (std::abs(ev) > 1.0 - tol) ++on_circle;
    // Loose radius for "at one": a double root splits by about sqrt(eps).
    if (std::abs(ev - 1.0) < 1e-6) ++at_one;
  }
  r.unit_simple = on_circle == 1 && at_one == 1;
  return r;
}

PolarizationResult polarization_limit(const Matrix& a, const OppositionStructure& f, const Vector& b0,
                                      const IterationOptions& opts) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b0.size() != n || static_cast<Eigen::Index>(f.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "A, structure and beliefs must agree in size");
  }
  const SpectrumReport spec = spectrum(a);
  if (!spec.unit_simple) {
    std::ostringstream msg;
    msg << "eigenvalues on or near the unit circle:";
    for (auto ev : spec.eigenvalues)
      if (std::abs(ev) > 1.0 - 1e-9 || std::abs(ev - 1.0) < 1e-6) msg << ' ' << ev;
    throw Error(ErrorKind::SpectralConditionFailed, msg.str());
  }

  // A^T s = s with the unit condition sum_i sign_i s_i = 1.
  const Vector sign = f.sign_vector();
  Matrix sys(n + 1, n);
  sys.topRows(n) = a.transpose() - Matrix::Identity(n, n);
  sys.row(n) = sign.transpose();
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;
  PolarizationResult r;
  r.s = sys.colPivHouseholderQr().solve(rhs);

  double sum_a = 0.0, sum_b = 0.0;
  std::size_t count_a = 0, count_b = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double si = r.s(static_cast<Eigen::Index>(i));
    if (f.side[i] == Side::A) sum_a += si, ++count_a;
    else sum_b += si, ++count_b;
  }
  r.x = count_a ? sum_a / static_cast<double>(count_a) : 0.0;
  r.y = count_b ? sum_b / static_cast<double>(count_b) : 0.0;
  r.coefficient = r.s.sum();
  r.limit_a = r.s.dot(b0);
  r.limit_b = -r.limit_a;

  r.iterated = iterate_linear(a, b0, opts);
  const Vector predicted = sign * r.limit_a;
  r.max_iteration_gap = (r.iterated.beliefs - predicted).cwiseAbs().maxCoeff();
  return r;
}

std::pair<double, double> closed_form_xy(const OppositionParams& p) {
  const double n2 = static_cast<double>(p.n2);
  const double denom = n2 * (p.d - p.b) - 1.0;
  if (std::abs(denom) < 1e-14) throw Error(ErrorKind::DegenerateDenominator, "n2 (d - b) = 1");
  const double y = p.b / denom;
  const double x = (1.0 + n2 * y) * p.a - n2 * p.c * y;
  return {x, y};
}

RowStochasticMatrix adjust_weights_grouped(const RowStochasticMatrix& w, const TruthfulSet& truthful,
                                           const TrustPolicy& policy, const OppositionStructure& f) {
  policy.validate();
  const std::size_t n = w.size();
  if (f.size() != n) throw Error(ErrorKind::DimensionMismatch, "structure and matrix sizes differ");
  const double increment = policy.delta * policy.multiplier(truthful.members.size(), n);
  if (truthful.empty() || increment == 0.0) return w;

  Matrix out = w.matrix();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double before = 0.0;
    double after = 0.0;
    bool touched = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (!f.same_side(i, j)) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      before += out(ii, jj);
      if (truthful.contains(j)) {
        out(ii, jj) += increment;
        touched = true;
      }
      after += out(ii, jj);
    }
    if (!touched) continue;
    const double scale = before / after;
    for (std::size_t j = 0; j < n; ++j)
      if (f.same_side(i, j)) out(ii, static_cast<Eigen::Index>(j)) *= scale;
  }
  return RowStochasticMatrix(std::move(out), 1e-10);
}

SideOneSpectrum check_spectrum_n1_equals_1(const OppositionParams& p) {
  if (p.n1 != 1) throw Error(ErrorKind::InvalidArgument, "side A must be a single agent");
  const RowStochasticMatrix w = block_trust_matrix(p);
  const auto f = OppositionStructure::blocks(p.n1, p.n2);
  const Matrix a = build_A(w, f);
  const double n = static_cast<double>(p.n1 + p.n2);

  SideOneSpectrum r;
  r.numeric = spectrum(a).eigenvalues;
  r.q = p.a - 1.0 + (n - 1.0) * p.d;
  r.q_alt = (n - 1.0) * (p.a * p.d - p.b * p.c);
  r.q_off_unit_circle = std::abs(std::abs(r.q) - 1.0) > 1e-12;

  std::vector<double> predicted(p.n1 + p.n2 - 2, 0.0);
  predicted.push_back(1.0);
  predicted.push_back(r.q);
  std::vector<bool> used(r.numeric.size(), false);
  for (double target : predicted) {
    double best = INFINITY;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < r.numeric.size(); ++k) {
      if (used[k]) continue;
      const double gap = std::abs(r.numeric[k] - target);
      if (gap < best) best = gap, best_k = k;
    }
    used[best_k] = true;
    r.max_error = std::max(r.max_error, best);
  }
  return r;
}

}  // namespace trustdyn
