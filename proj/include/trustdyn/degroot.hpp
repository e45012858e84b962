#pragma once

#include <functional>
#include <optional>

#include "trustdyn/core.hpp"

namespace trustdyn {

struct IterationOptions {
  double tol = 1e-10;            // stop when max |b(t+1) - b(t)| < tol
  int max_rounds = 100000;
  double consensus_tol = 1e-8;   // range below this counts as consensus
  double overflow_bound = 1e12;  // |belief| above this flags divergence
};

struct LimitResult {
  Vector beliefs;
  bool converged = false;
  int rounds_used = 0;  // -1 when the limit came from a closed-form evaluation
  bool is_consensus = false;
  std::optional<double> consensus_value;
  bool diverged = false;
};

struct InfluenceVector {
  Vector s;
};

/// Called with (round, beliefs) for round 0 and after every update.
using RoundObserver = std::function<void(int, const Vector&)>;

Vector step(const RowStochasticMatrix& w, const Vector& b);

/// Iterates b <- A b for an arbitrary square matrix. Divergence is reported
/// in the result rather than thrown; the last finite beliefs are kept.
LimitResult iterate_linear(const Matrix& a, const Vector& b0, const IterationOptions& opts = {},
                           const RoundObserver& observer = {});

/// DeGroot iteration to the limit. Throws Diverged if beliefs blow up, which
/// only happens for non-finite input.
LimitResult iterate_to_limit(const RowStochasticMatrix& w, const Vector& b0,
                             const IterationOptions& opts = {}, const RoundObserver& observer = {});

/// Left fixed vector s = W^T s, normalized to sum 1. Requires a positive
/// column in some power of W (NoConsensus otherwise).
InfluenceVector social_influence(const RowStochasticMatrix& w);

/// Same computation for any matrix with unit row sums (e.g. the conformity
/// matrix, which can have negative entries). No consensus precondition check.
InfluenceVector left_unit_eigenvector(const Matrix& m, double residual_tol = 1e-12);

void fill_consensus(LimitResult& r, double consensus_tol);

// --- self-weight (DeMarzo) variant -----------------------------------------

struct LambdaSchedule {
  enum class Kind { Constant, Harmonic, Geometric };
  Kind kind = Kind::Constant;
  double value = 1.0;  // lambda for Constant, ratio for Geometric

  /// lambda_t for t = 0, 1, 2, ... Harmonic is 1/(t+1), Geometric is ratio^t.
  double at(int t) const;
  bool has_divergent_sum() const { return kind != Kind::Geometric; }
  void validate() const;
};

/// ((1 - lambda) I + lambda W) b with 0 < lambda <= 1.
Vector step_self_weight(const RowStochasticMatrix& w, const Vector& b, double lambda);

/// Round-by-round iteration under the schedule.
LimitResult iterate_self_weight(const RowStochasticMatrix& w, const Vector& b0,
                                const LambdaSchedule& schedule, const IterationOptions& opts = {},
                                const RoundObserver& observer = {});

/// Product of the first `rounds` schedule factors applied to b0, evaluated in
/// the eigenbasis of W. All factors are polynomials in W, so they share its
/// eigenvectors and each eigenvalue mu picks up prod_t (1 - lambda_t (1 - mu)).
/// The harmonic product has the closed form Gamma(t+mu) / (Gamma(mu) Gamma(t+1)).
/// Returns nullopt when W is too far from diagonalizable for this to be accurate.
std::optional<Vector> self_weight_product(const RowStochasticMatrix& w, const Vector& b0,
                                          const LambdaSchedule& schedule, double rounds);

/// Limit of the schedule dynamics. Uses the spectral product at a horizon
/// where the remaining factors no longer change the result, falling back to
/// round-by-round iteration for defective matrices.
LimitResult self_weight_limit(const RowStochasticMatrix& w, const Vector& b0,
                              const LambdaSchedule& schedule, const IterationOptions& opts = {});

}  // namespace trustdyn
