#include "trustdyn/conformity.hpp"

#include <cmath>

#include "trustdyn/opposition.hpp"

namespace trustdyn {

namespace {

void check_deltas(const Vector& deltas, std::size_t n) {
  if (static_cast<std::size_t>(deltas.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "need one conformity parameter per agent");
  }
  if (!(deltas.array().abs() < 1.0).all()) {
    throw Error(ErrorKind::InvalidArgument, "conformity parameters must lie in (-1, 1)");
  }
}

void check_reference(const Matrix& q) {
  const Eigen::Index n = q.rows();
  if (q.cols() != n) throw Error(ErrorKind::DimensionMismatch, "Q must be square");
  if (n == 1) return;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (q(i, i) != 0.0) throw Error(ErrorKind::InvalidArgument, "Q must have a zero diagonal");
    if ((q.row(i).array() < 0.0).any() || std::abs(q.row(i).sum() - 1.0) > 1e-12) {
      throw Error(ErrorKind::InvalidArgument, "Q must be row-stochastic");
    }
  }
}

Matrix delta_diag(const Vector& deltas) { return deltas.asDiagonal(); }

}  // namespace

void ConformityParams::validate(std::size_t n) const {
  check_deltas(deltas, n);
  if (mode == ReferenceMode::Explicit) {
    if (static_cast<std::size_t>(q.rows()) != n) throw Error(ErrorKind::DimensionMismatch, "Q has wrong size");
    check_reference(q);
  }
}

ResolvedReference reference_matrix(const RowStochasticMatrix& w, const ConformityParams& params) {
  const auto n = static_cast<Eigen::Index>(w.size());
  if (params.mode == ReferenceMode::Explicit) {
    params.validate(w.size());
    return {params.q, {}};
  }
  ResolvedReference out{Matrix::Zero(n, n), {}};
  if (n == 1) return out;
  const Matrix& m = w.matrix();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double off = 1.0 - m(i, i);
    if (off <= 1e-15) {
      out.isolated.push_back(static_cast<std::size_t>(i));
      out.q.row(i).setConstant(1.0 / static_cast<double>(n - 1));
      out.q(i, i) = 0.0;
      continue;
    }
    for (Eigen::Index j = 0; j < n; ++j) out.q(i, j) = (i == j) ? 0.0 : m(i, j) / off;
  }
  return out;
}

StatedOpinions nash_stated(const Vector& b, const Vector& deltas, const Matrix& q) {
  const auto n = static_cast<std::size_t>(b.size());
  check_deltas(deltas, n);
  if (static_cast<std::size_t>(q.rows()) != n) throw Error(ErrorKind::DimensionMismatch, "Q has wrong size");
  const auto k = static_cast<Eigen::Index>(n);
  const Matrix delta = delta_diag(deltas);
  const Matrix system = Matrix::Identity(k, k) - delta * q;
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularSystem, "I - Delta Q is singular");
  const Vector rhs = b - delta * b;

  StatedOpinions out;
  out.s_star = lu.solve(rhs);
  // First-order conditions of u_i = -(1-d_i)(s_i-b_i)^2 - d_i (s_i-q_i)^2.
  const Vector foc = out.s_star - rhs - delta * (q * out.s_star);
  out.residual = n ? foc.cwiseAbs().maxCoeff() : 0.0;
  return out;
}

StatedOpinions nash_stated(const Vector& b, const RowStochasticMatrix& w, const ConformityParams& params) {
  return nash_stated(b, params.deltas, reference_matrix(w, params).q);
}

Matrix build_M(const RowStochasticMatrix& w, const Vector& deltas, const Matrix& q) {
  check_deltas(deltas, w.size());
  const auto n = static_cast<Eigen::Index>(w.size());
  const Matrix delta = delta_diag(deltas);
  const Matrix eye = Matrix::Identity(n, n);
  Eigen::FullPivLU<Matrix> lu(eye - delta * q);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularSystem, "I - Delta Q is singular");
  const Matrix stated_map = lu.solve(eye - delta);
  const Matrix diag = w.matrix().diagonal().asDiagonal();
  return diag + (w.matrix() - diag) * stated_map;
}

Matrix build_M(const RowStochasticMatrix& w, const ConformityParams& params) {
  return build_M(w, params.deltas, reference_matrix(w, params).q);
}

InfluenceVector conformity_influence(const RowStochasticMatrix& w, const ConformityParams& params) {
  const Matrix m = build_M(w, params);
  if ((m.array() >= -1e-15).all()) {
    if (!has_positive_column(m.cwiseMax(0.0))) {
      throw Error(ErrorKind::NoConsensus, "M has no power with a positive column");
    }
  } else if (!spectrum(m).unit_simple) {
    throw Error(ErrorKind::NoConsensus, "M has eigenvalues other than 1 on or outside the unit circle");
  }
  InfluenceVector v = left_unit_eigenvector(m, 1e-10);
  return v;
}

double three_agent_influence(double a, double b) { return a * (1.0 - b) / (4.0 - a * b - 3.0 * a); }

LimitResult run_conformity_topic(const RowStochasticMatrix& w, const ConformityParams& params, const Vector& b0,
                                 const IterationOptions& opts, const RoundObserver& observer) {
  return iterate_linear(build_M(w, params), b0, opts, observer);
}

}  // namespace trustdyn
