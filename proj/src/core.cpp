#include "trustdyn/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trustdyn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroRow: return "ZeroRow";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::NoConsensus: return "NoConsensus";
    case ErrorKind::BadLambda: return "BadLambda";
    case ErrorKind::NoSuccess: return "NoSuccess";
    case ErrorKind::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorKind::SpectralConditionFailed: return "SpectralConditionFailed";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UnknownTarget: return "UnknownTarget";
  }
  return "Unknown";
}

bool is_row_stochastic(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double x = m(i, j);
      if (!std::isfinite(x) || x < -tol || x > 1.0 + tol) return false;
    }
    if (std::abs(m.row(i).sum() - 1.0) > tol) return false;
  }
  return true;
}

RowStochasticMatrix::RowStochasticMatrix(Matrix entries, double tol) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "trust matrix must be square and non-empty");
  }
  if (!is_row_stochastic(m_, tol)) {
    throw Error(ErrorKind::InvalidArgument, "matrix is not row-stochastic");
  }
}

RowStochasticMatrix RowStochasticMatrix::identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return RowStochasticMatrix(Matrix::Identity(k, k), Unchecked{});
}

RowStochasticMatrix RowStochasticMatrix::uniform(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return RowStochasticMatrix(Matrix::Constant(k, k, 1.0 / static_cast<double>(n)), Unchecked{});
}

RowStochasticMatrix normalize_rows(const Matrix& raw) {
  if (raw.rows() != raw.cols() || raw.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "raw weight matrix must be square and non-empty");
  }
  Matrix out = raw;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if ((out.row(i).array() < 0.0).any()) {
      throw Error(ErrorKind::InvalidArgument, "negative raw weight in row " + std::to_string(i));
    }
    const double s = out.row(i).sum();
    if (!(s > 0.0)) {
      throw Error(ErrorKind::ZeroRow, "row " + std::to_string(i) + " sums to zero");
    }
    out.row(i) /= s;
  }
  return RowStochasticMatrix(std::move(out), RowStochasticMatrix::Unchecked{});
}

namespace {

using BoolMatrix = std::vector<std::vector<char>>;

BoolMatrix pattern_of(const Matrix& w) {
  const auto n = static_cast<std::size_t>(w.rows());
  BoolMatrix p(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      p[i][j] = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0 ? 1 : 0;
  return p;
}

BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t n = a.size();
  BoolMatrix c(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) {
      if (!a[i][l]) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] |= b[l][j];
    }
  return c;
}

std::optional<std::size_t> first_full_column(const BoolMatrix& p) {
  const std::size_t n = p.size();
  for (std::size_t j = 0; j < n; ++j) {
    bool full = true;
    for (std::size_t i = 0; i < n && full; ++i) full = p[i][j] != 0;
    if (full) return j;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> has_positive_column(const Matrix& w, std::optional<std::size_t> max_power) {
  if (w.rows() != w.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
  const auto n = static_cast<std::size_t>(w.rows());
  std::size_t bound = max_power.value_or(n * n);
  if (bound < 1) throw Error(ErrorKind::InvalidArgument, "max_power must be >= 1");

  const BoolMatrix base = pattern_of(w);
  for (const auto& row : base)
    if (std::find(row.begin(), row.end(), 1) == row.end()) return std::nullopt;

  // With no empty rows, a column positive in W^p stays positive in W^(p+1),
  // so testing the single power W^bound covers every power <= bound.
  {
    BoolMatrix probe = base;
    for (std::size_t p = 1;; p *= 2) {
      if (auto j = first_full_column(probe)) return j;
      if (p > bound / 2) break;
      probe = bool_product(probe, probe);
    }
  }
  BoolMatrix result;
  BoolMatrix square = base;
  bool have_result = false;
  while (bound > 0) {
    if (bound & 1U) {
      result = have_result ? bool_product(result, square) : square;
      have_result = true;
    }
    bound >>= 1U;
    if (bound > 0) square = bool_product(square, square);
  }
  return first_full_column(result);
}

std::optional<std::size_t> has_positive_column(const RowStochasticMatrix& w,
                                               std::optional<std::size_t> max_power) {
  return has_positive_column(w.matrix(), max_power);
}

void TrustPolicy::validate() const {
  if (!(eta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be >= 0");
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be > 0");
}

double t_value(TFunction f, std::size_t truthful, std::size_t n) {
  switch (f) {
    case TFunction::ConstantOne:
      return 1.0;
    case TFunction::ZeroAtN:
      return truthful >= n ? 0.0 : 1.0;
    case TFunction::NegLogFraction:
      if (truthful == 0 || truthful >= n) return 0.0;
      return -std::log(static_cast<double>(truthful) / static_cast<double>(n));
  }
  return 1.0;
}

double TrustPolicy::multiplier(std::size_t truthful, std::size_t n) const {
  return t_value(t_function, truthful, n);
}

TruthSequence::TruthSequence(Mode mode) : mode_(std::move(mode)) {
  if (const auto* e = std::get_if<Explicit>(&mode_); e && e->values.empty()) {
    throw Error(ErrorKind::InvalidArgument, "explicit truth sequence is empty");
  }
}

double TruthSequence::at(int k) const {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "topic index must be >= 1");
  if (const auto* c = std::get_if<Constant>(&mode_)) return c->mu;
  if (const auto* e = std::get_if<Explicit>(&mode_)) {
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(k - 1), e->values.size() - 1);
    return e->values[idx];
  }
  const auto& a = std::get<Affine>(mode_);
  return a.slope * static_cast<double>(k) + a.intercept;
}

bool TruthSequence::is_constant() const {
  if (std::holds_alternative<Constant>(mode_)) return true;
  if (const auto* e = std::get_if<Explicit>(&mode_)) {
    for (double v : e->values)
      if (v != e->values.front()) return false;
    return true;
  }
  return std::get<Affine>(mode_).slope == 0.0;
}

}  // namespace trustdyn
