#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "trustdyn/error.hpp"

namespace trustdyn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kStochasticTol = 1e-12;

/// n x n trust matrix with nonnegative entries and unit row sums.
///
/// Construction validates the invariants; the object is immutable afterwards.
/// Use normalize_rows() to build one from raw nonnegative weights.
class RowStochasticMatrix {
 public:
  explicit RowStochasticMatrix(Matrix entries, double tol = kStochasticTol);

  static RowStochasticMatrix identity(std::size_t n);
  static RowStochasticMatrix uniform(std::size_t n);

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Matrix& matrix() const { return m_; }

 private:
  struct Unchecked {};
  RowStochasticMatrix(Matrix entries, Unchecked) : m_(std::move(entries)) {}
  friend RowStochasticMatrix normalize_rows(const Matrix& raw);

  Matrix m_;
};

/// Beliefs of all agents on topic k (1-based) at round t.
struct BeliefState {
  int topic = 1;
  int round = 0;
  Vector beliefs;
};

enum class AdjustmentTime { InitialBeliefs, LimitBeliefs };
enum class TFunction { ConstantOne, ZeroAtN, NegLogFraction };

/// Cross-topic trust increment rule: agent j within eta of the revealed truth
/// receives delta * T(|N|) from every agent.
struct TrustPolicy {
  double eta = 0.25;
  double delta = 0.2;
  AdjustmentTime tau = AdjustmentTime::InitialBeliefs;
  TFunction t_function = TFunction::ConstantOne;

  void validate() const;
  /// Multiplier T(m) for m truthful agents out of n.
  double multiplier(std::size_t truthful, std::size_t n) const;
};

double t_value(TFunction f, std::size_t truthful, std::size_t n);

class TruthSequence {
 public:
  struct Constant {
    double mu = 0.0;
  };
  struct Explicit {
    std::vector<double> values;  // values[k-1]; the last value repeats past the end
  };
  struct Affine {
    double slope = 0.0;
    double intercept = 0.0;
  };
  using Mode = std::variant<Constant, Explicit, Affine>;

  TruthSequence() : mode_(Constant{}) {}
  explicit TruthSequence(Mode mode);

  /// Truth for topic k >= 1.
  double at(int k) const;
  bool is_constant() const;
  const Mode& mode() const { return mode_; }

 private:
  Mode mode_;
};

/// Divides every row by its sum. Throws ZeroRow when a row sums to zero.
RowStochasticMatrix normalize_rows(const Matrix& raw);

/// Smallest column index that is strictly positive in some boolean power
/// W^p, 1 <= p <= max_power. max_power defaults to n^2.
std::optional<std::size_t> has_positive_column(const RowStochasticMatrix& w,
                                               std::optional<std::size_t> max_power = {});
std::optional<std::size_t> has_positive_column(const Matrix& w,
                                               std::optional<std::size_t> max_power = {});

bool is_row_stochastic(const Matrix& m, double tol = kStochasticTol);

}  // namespace trustdyn
