#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "trustdyn/degroot.hpp"
#include "trustdyn/trust.hpp"

namespace trustdyn {

enum class Side { A, B };

/// Opposition-bipartite structure: agents follow their own side and apply
/// soft opposition D(x) = -x to the other side's beliefs.
struct OppositionStructure {
  std::vector<Side> side;

  static OppositionStructure blocks(std::size_t n1, std::size_t n2);
  std::size_t size() const { return side.size(); }
  bool same_side(std::size_t i, std::size_t j) const { return side[i] == side[j]; }
  /// +1 for side A, -1 for side B.
  Vector sign_vector() const;
};

/// Uniform block weights: a within A, b from A to B, c from B to A, d within B.
struct OppositionParams {
  std::size_t n1 = 1;
  std::size_t n2 = 1;
  double a = 0.5, b = 0.5, c = 0.5, d = 0.5;

  void validate(double tol = 1e-12) const;
  /// Fig.-style parametrization: c and d fixed, a = (1 - n2 b) / n1.
  static OppositionParams from_b(std::size_t n1, std::size_t n2, double b, double c);
};

RowStochasticMatrix block_trust_matrix(const OppositionParams& p);

/// A_ij = W_ij on the same side, -W_ij across sides.
Matrix build_A(const RowStochasticMatrix& w, const OppositionStructure& f);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  // sorted by decreasing modulus
  bool unit_simple = false;  // 1 is a simple eigenvalue and the only one on the unit circle
};

SpectrumReport spectrum(const Matrix& a, double tol = 1e-9);

struct PolarizationResult {
  Vector s;                       // signed influence, sum |s_i| = 1
  double x = 0.0;                 // mean influence of side A members
  double y = 0.0;                 // mean influence of side B members (signed)
  double coefficient = 0.0;       // sum_j s_j = n1 x + n2 y
  double limit_a = 0.0;           // <s, b0>
  double limit_b = 0.0;           // -<s, b0>
  LimitResult iterated;           // A^t b0, for cross-validation
  double max_iteration_gap = 0.0; // |iterated - predicted| in the max norm
};

/// Limit of b <- A b. Throws SpectralConditionFailed (listing the offending
/// eigenvalues) unless 1 is simple and the only eigenvalue on the unit circle.
PolarizationResult polarization_limit(const Matrix& a, const OppositionStructure& f, const Vector& b0,
                                      const IterationOptions& opts = {});

/// y = b / (n2 (d - b) - 1), x = (1 + n2 y) a - n2 c y.
std::pair<double, double> closed_form_xy(const OppositionParams& p);

/// Truth increments restricted to same-side pairs. Cross-side entries keep
/// their values; each row's same-side block is rescaled back to its previous
/// mass so the row stays stochastic.
RowStochasticMatrix adjust_weights_grouped(const RowStochasticMatrix& w, const TruthfulSet& truthful,
                                           const TrustPolicy& policy, const OppositionStructure& f);

struct SideOneSpectrum {
  std::vector<std::complex<double>> numeric;
  double q = 0.0;               // a - 1 + (n-1) d
  double q_alt = 0.0;           // (n-1)(ad - bc)
  double max_error = 0.0;       // numeric vs {0 x (n-2), 1, q}
  bool q_off_unit_circle = false;
};

/// Spectrum of A when side A is a single agent: {0 (n-2 times), 1, q}.
SideOneSpectrum check_spectrum_n1_equals_1(const OppositionParams& p);

}  // namespace trustdyn
