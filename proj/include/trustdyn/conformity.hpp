#pragma once

#include <optional>
#include <vector>

#include "trustdyn/degroot.hpp"

namespace trustdyn {

enum class ReferenceMode { Explicit, DerivedFromW };

/// Conformity parameters delta_i in (-1, 1) (negative: counter-conformity) and
/// the reference-opinion matrix Q (row-stochastic, zero diagonal).
struct ConformityParams {
  Vector deltas;
  ReferenceMode mode = ReferenceMode::Explicit;
  Matrix q;  // used when mode == Explicit

  void validate(std::size_t n) const;
};

struct ResolvedReference {
  Matrix q;
  std::vector<std::size_t> isolated;  // agents with W_ii = 1; their Q row was set uniform
};

/// Q for the given trust matrix: the explicit one, or Q_ij = W_ij / (1 - W_ii).
ResolvedReference reference_matrix(const RowStochasticMatrix& w, const ConformityParams& params);

struct StatedOpinions {
  Vector s_star;
  double residual = 0.0;  // max |s_i - (1 - delta_i) b_i - delta_i (Q s)_i|
};

/// Unique Nash equilibrium s* = (I - Delta Q)^-1 (I - Delta) b of the stated-opinion game.
StatedOpinions nash_stated(const Vector& b, const Vector& deltas, const Matrix& q);
StatedOpinions nash_stated(const Vector& b, const RowStochasticMatrix& w, const ConformityParams& params);

/// M = D + (W - D)(I - Delta Q)^-1 (I - Delta), D = diag(W).
Matrix build_M(const RowStochasticMatrix& w, const Vector& deltas, const Matrix& q);
Matrix build_M(const RowStochasticMatrix& w, const ConformityParams& params);

/// Left fixed vector of M normalized to sum 1; NoConsensus if M does not
/// drive every start to a consensus.
InfluenceVector conformity_influence(const RowStochasticMatrix& w, const ConformityParams& params);

/// Influence of the third agent in the three-agent example:
/// W rows (1/2, 1/2, 0), uniform off-diagonal Q, deltas (a, a, b).
double three_agent_influence(double a, double b);

/// Iterates b <- M b; divergence (counter-conformity) is flagged in the result.
LimitResult run_conformity_topic(const RowStochasticMatrix& w, const ConformityParams& params, const Vector& b0,
                                 const IterationOptions& opts = {}, const RoundObserver& observer = {});

}  // namespace trustdyn
