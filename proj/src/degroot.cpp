#include "trustdyn/degroot.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace trustdyn {

namespace {

void check_dims(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.cols() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "matrix is " + std::to_string(a.rows()) + "x" +
                                                  std::to_string(a.cols()) + ", beliefs have " +
                                                  std::to_string(b.size()) + " entries");
  }
}

}  // namespace

Vector step(const RowStochasticMatrix& w, const Vector& b) {
  check_dims(w.matrix(), b);
  return w.matrix() * b;
}

void fill_consensus(LimitResult& r, double consensus_tol) {
  if (r.beliefs.size() == 0) return;
  const double range = r.beliefs.maxCoeff() - r.beliefs.minCoeff();
  r.is_consensus = std::isfinite(range) && range < consensus_tol;
  if (r.is_consensus) r.consensus_value = r.beliefs.mean();
  else r.consensus_value.reset();
}

LimitResult iterate_linear(const Matrix& a, const Vector& b0, const IterationOptions& opts,
                           const RoundObserver& observer) {
  check_dims(a, b0);
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be > 0");

  LimitResult r;
  r.beliefs = b0;
  if (observer) observer(0, r.beliefs);
  Vector next(b0.size());
  for (int t = 1; t <= opts.max_rounds; ++t) {
    next.noalias() = a * r.beliefs;
    const double peak = next.size() ? next.cwiseAbs().maxCoeff() : 0.0;
    if (!std::isfinite(peak) || peak > opts.overflow_bound) {
      r.diverged = true;
      r.rounds_used = t;
      break;
    }
    const double change = next.size() ? (next - r.beliefs).cwiseAbs().maxCoeff() : 0.0;
    r.beliefs.swap(next);
    r.rounds_used = t;
    if (observer) observer(t, r.beliefs);
    if (change < opts.tol) {
      r.converged = true;
      break;
    }
  }
  fill_consensus(r, opts.consensus_tol);
  return r;
}

LimitResult iterate_to_limit(const RowStochasticMatrix& w, const Vector& b0,
                             const IterationOptions& opts, const RoundObserver& observer) {
  LimitResult r = iterate_linear(w.matrix(), b0, opts, observer);
  if (r.diverged) throw Error(ErrorKind::Diverged, "beliefs exceeded the overflow bound");
  return r;
}

InfluenceVector left_unit_eigenvector(const Matrix& m, double residual_tol) {
  const Eigen::Index n = m.rows();
  // (M^T - I) s = 0 together with sum(s) = 1, solved in the least-squares sense.
  Matrix sys(n + 1, n);
  sys.topRows(n) = m.transpose() - Matrix::Identity(n, n);
  sys.row(n).setOnes();
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;
  Vector s = sys.colPivHouseholderQr().solve(rhs);
  const double residual = (m.transpose() * s - s).cwiseAbs().maxCoeff();
  if (!std::isfinite(residual) || residual > std::max(residual_tol, 1e-9)) {
    throw Error(ErrorKind::SingularSystem,
                "no unique left fixed vector (residual " + std::to_string(residual) + ")");
  }
  return {std::move(s)};
}

InfluenceVector social_influence(const RowStochasticMatrix& w) {
  if (!has_positive_column(w)) {
    throw Error(ErrorKind::NoConsensus, "no power of W has a strictly positive column");
  }
  const Matrix& m = w.matrix();
  const Eigen::Index n = m.rows();
  Vector s = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector next(n);
  for (int it = 0; it < 20000; ++it) {
    next.noalias() = m.transpose() * s;
    next /= next.sum();
    const double residual = (next - s).cwiseAbs().maxCoeff();
    s.swap(next);
    if (residual < 1e-12) return {std::move(s)};
  }
  // Slow mixing: fall back to the dense solve.
  InfluenceVector out = left_unit_eigenvector(m);
  out.s = out.s.cwiseMax(0.0);
  out.s /= out.s.sum();
  return out;
}

// --- self-weight variant ------------------------------------------------------

double LambdaSchedule::at(int t) const {
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::Harmonic: return 1.0 / (static_cast<double>(t) + 1.0);
    case Kind::Geometric: return std::pow(value, t);
  }
  return value;
}

void LambdaSchedule::validate() const {
  if (kind == Kind::Constant && !(value > 0.0 && value <= 1.0)) {
    throw Error(ErrorKind::BadLambda, "constant lambda must lie in (0, 1]");
  }
  if (kind == Kind::Geometric && !(value > 0.0 && value < 1.0)) {
    throw Error(ErrorKind::BadLambda, "geometric ratio must lie in (0, 1)");
  }
}

Vector step_self_weight(const RowStochasticMatrix& w, const Vector& b, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::BadLambda, "lambda_t = " + std::to_string(lambda) + " not in (0, 1]");
  }
  check_dims(w.matrix(), b);
  return (1.0 - lambda) * b + lambda * (w.matrix() * b);
}

LimitResult iterate_self_weight(const RowStochasticMatrix& w, const Vector& b0,
                                const LambdaSchedule& schedule, const IterationOptions& opts,
                                const RoundObserver& observer) {
  schedule.validate();
  check_dims(w.matrix(), b0);
  LimitResult r;
  r.beliefs = b0;
  if (observer) observer(0, r.beliefs);
  for (int t = 0; t < opts.max_rounds; ++t) {
    Vector next = step_self_weight(w, r.beliefs, schedule.at(t));
    const double change = (next - r.beliefs).cwiseAbs().maxCoeff();
    r.beliefs.swap(next);
    r.rounds_used = t + 1;
    if (observer) observer(t + 1, r.beliefs);
    if (change < opts.tol) {
      r.converged = true;
      break;
    }
  }
  fill_consensus(r, opts.consensus_tol);
  return r;
}

namespace {

using Complex = std::complex<double>;

// Lanczos approximation (g = 7, n = 9).
Complex gamma_lanczos(Complex z) {
  static constexpr double kCoef[] = {0.99999999999980993,  676.5203681218851,
                                     -1259.1392167224028,  771.32342877765313,
                                     -176.61502916214059,  12.507343278686905,
                                     -0.13857109526572012, 9.9843695780195716e-6,
                                     1.5056327351493116e-7};
  z -= 1.0;
  Complex x = kCoef[0];
  for (int i = 1; i < 9; ++i) x += kCoef[i] / (z + static_cast<double>(i));
  const Complex t = z + 7.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// 1 / Gamma(z); entire, so the poles of Gamma map to exact zeros.
Complex inv_gamma(Complex z) {
  if (z.real() < 0.5) {
    // Reflection: 1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi.
    return gamma_lanczos(1.0 - z) * std::sin(std::numbers::pi * z) / std::numbers::pi;
  }
  return 1.0 / gamma_lanczos(z);
}

// Gamma(T + mu) / (Gamma(mu) Gamma(T + 1)) for T = exp(log_t), from
// Gamma(T + mu) / Gamma(T + 1) = T^(mu - 1) (1 + mu (mu - 1) / (2T) + O(T^-2)).
Complex harmonic_factor_log(Complex mu, double log_t) {
  return std::exp((mu - 1.0) * log_t) * (1.0 + mu * (mu - 1.0) * 0.5 * std::exp(-log_t)) * inv_gamma(mu);
}

Complex schedule_factor(const LambdaSchedule& schedule, Complex mu, double rounds) {
  const Complex gap = 1.0 - mu;
  switch (schedule.kind) {
    case LambdaSchedule::Kind::Constant: {
      const Complex base = 1.0 - schedule.value * gap;
      if (std::abs(base) == 0.0) return 0.0;
      return std::exp(rounds * std::log(base));
    }
    case LambdaSchedule::Kind::Geometric: {
      Complex f = 1.0;
      double lambda = 1.0;
      for (double t = 0; t < rounds && lambda > 1e-300; t += 1.0) {
        f *= 1.0 - lambda * gap;
        lambda *= schedule.value;
      }
      return f;
    }
    case LambdaSchedule::Kind::Harmonic: {
      if (rounds <= 1e6) {
        // prod_{t<rounds} (t + mu) / (t + 1)
        Complex f = 1.0;
        for (double t = 0; t < rounds; t += 1.0) f *= (t + mu) / (t + 1.0);
        return f;
      }
      return harmonic_factor_log(mu, std::log(rounds));
    }
  }
  return 1.0;
}

}  // namespace

namespace {

struct Eigenbasis {
  Eigen::MatrixXcd v;
  Eigen::VectorXcd values;
  Eigen::VectorXcd coeff;  // b0 in the eigenbasis
};

std::optional<Eigenbasis> eigenbasis(const RowStochasticMatrix& w, const Vector& b0) {
  Eigen::EigenSolver<Matrix> es(w.matrix());
  if (es.info() != Eigen::Success) return std::nullopt;
  Eigenbasis e{es.eigenvectors(), es.eigenvalues(), {}};
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(e.v);
  const Eigen::MatrixXcd v_inv = lu.inverse();
  const double cond = e.v.cwiseAbs().colwise().sum().maxCoeff() * v_inv.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(cond) || cond > 1e8) return std::nullopt;
  e.coeff = v_inv * b0.cast<Complex>();
  return e;
}

template <class Factor>
Vector apply_factors(const Eigenbasis& e, Factor factor) {
  Eigen::VectorXcd c = e.coeff;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= factor(e.values(i));
  return (e.v * c).real();
}

// Harmonic limit when W has no usable eigenbasis. With s the left unit vector,
// W = 1 s^T + R where R kills 1, so f(W) b0 = (s.b0) 1 + f(R) r for
// r = b0 - (s.b0) 1. f(R) r is the resolvent integral over |z| = radius,
// which encloses the spectrum of R but not 1.
std::optional<LimitResult> harmonic_split(const Matrix& m, const Vector& b0, const IterationOptions& opts) {
  const Eigen::Index n = m.rows();
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) return std::nullopt;
  int at_one = 0;
  double rest = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex mu = es.eigenvalues()(i);
    if (std::abs(mu - 1.0) < 1e-6) {
      ++at_one;
    } else {
      rest = std::max(rest, std::abs(mu));
    }
  }
  if (at_one != 1 || rest > 1.0 - 1e-6) return std::nullopt;

  Vector s;
  try {
    s = left_unit_eigenvector(m).s;
  } catch (const Error&) {
    return std::nullopt;
  }
  const double centre = s.dot(b0);
  const Matrix r_mat = m - Vector::Ones(n) * s.transpose();
  const Eigen::VectorXcd r = (b0 - Vector::Constant(n, centre)).cast<Complex>();

  const double radius = 0.5 * (1.0 + rest);
  constexpr int kNodes = 128;
  double worst_inv_gamma = 1.0;
  std::vector<Complex> nodes;
  for (int k = 0; k < kNodes; ++k) {
    nodes.push_back(std::polar(radius, 2.0 * std::numbers::pi * k / kNodes));
    worst_inv_gamma = std::max(worst_inv_gamma, std::abs(inv_gamma(nodes.back())));
  }
  const double log_t = std::max(std::log(1e30), (46.0 + std::log(worst_inv_gamma)) / (1.0 - radius));

  std::vector<Eigen::VectorXcd> resolvent;
  for (const Complex z : nodes) {
    const Eigen::MatrixXcd shifted = z * Eigen::MatrixXcd::Identity(n, n) - r_mat.cast<Complex>();
    resolvent.push_back(shifted.partialPivLu().solve(r));
  }
  const auto remainder = [&](double lt) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
    for (int k = 0; k < kNodes; ++k) acc += harmonic_factor_log(nodes[k], lt) * nodes[k] * resolvent[k];
    return Vector((acc / static_cast<double>(kNodes)).real());
  };
  const Vector near = remainder(log_t), far = remainder(2.0 * log_t);
  if (!near.allFinite() || !far.allFinite()) return std::nullopt;

  LimitResult out;
  out.beliefs = Vector::Constant(n, centre) + far;
  out.converged = (far - near).cwiseAbs().maxCoeff() < opts.tol;
  out.rounds_used = -1;
  fill_consensus(out, opts.consensus_tol);
  return out;
}

}  // namespace

std::optional<Vector> self_weight_product(const RowStochasticMatrix& w, const Vector& b0,
                                          const LambdaSchedule& schedule, double rounds) {
  schedule.validate();
  check_dims(w.matrix(), b0);
  const auto e = eigenbasis(w, b0);
  if (!e) return std::nullopt;
  return apply_factors(*e, [&](Complex mu) { return schedule_factor(schedule, mu, rounds); });
}

LimitResult self_weight_limit(const RowStochasticMatrix& w, const Vector& b0,
                              const LambdaSchedule& schedule, const IterationOptions& opts) {
  schedule.validate();
  if (schedule.kind == LambdaSchedule::Kind::Constant) {
    const auto n = static_cast<Eigen::Index>(w.size());
    const Matrix a = (1.0 - schedule.value) * Matrix::Identity(n, n) + schedule.value * w.matrix();
    return iterate_linear(a, b0, opts);
  }

  check_dims(w.matrix(), b0);
  const auto e = eigenbasis(w, b0);
  if (!e) {
    if (schedule.kind == LambdaSchedule::Kind::Harmonic)
      if (auto split = harmonic_split(w.matrix(), b0, opts)) return *split;
    return iterate_self_weight(w, b0, schedule, opts);
  }

  std::optional<Vector> at_near, at_far;
  if (schedule.kind == LambdaSchedule::Kind::Geometric) {
    // factors are exactly 1 once lambda_t underflows
    at_near = apply_factors(*e, [&](Complex mu) { return schedule_factor(schedule, mu, 1e5); });
    at_far = apply_factors(*e, [&](Complex mu) { return schedule_factor(schedule, mu, 2e5); });
  } else {
    // Harmonic factors decay like T^(Re mu - 1); pick log T so that every
    // non-unit eigenvalue is below 1e-16, which can need T far beyond double range.
    double log_t = std::log(1e30);
    for (Eigen::Index i = 0; i < e->values.size(); ++i) {
      const Complex mu = e->values(i);
      if (std::abs(1.0 - mu) < 1e-12) continue;
      const double scale = std::log(std::max(std::abs(inv_gamma(mu)), 1e-300));
      log_t = std::max(log_t, (37.0 + scale) / std::max(1.0 - mu.real(), 1e-300));
    }
    const auto factor_at = [&](double lt) {
      return [&, lt](Complex mu) {
        return std::abs(1.0 - mu) < 1e-12 ? Complex(1.0) : harmonic_factor_log(mu, lt);
      };
    };
    at_near = apply_factors(*e, factor_at(log_t));
    at_far = apply_factors(*e, factor_at(2.0 * log_t));
  }

  LimitResult r;
  r.beliefs = *at_far;
  r.converged = (*at_far - *at_near).cwiseAbs().maxCoeff() < opts.tol;
  r.rounds_used = -1;
  fill_consensus(r, opts.consensus_tol);
  return r;
}

}  // namespace trustdyn
