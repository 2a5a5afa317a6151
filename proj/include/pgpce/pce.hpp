#pragma once

#include <vector>

#include "pgpce/manifold.hpp"

namespace pgpce {

/// Total-degree multi-index set {alpha : |alpha|_1 <= max_degree}.
/// Ordered by total degree, then lexicographically descending within a
/// degree: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
struct MultiIndexSet {
  int dim = 0;
  int max_degree = 0;
  std::vector<std::vector<int>> indices;

  std::size_t size() const { return indices.size(); }
};

/// Number of terms (s + d)! / (s! d!). Throws PreconditionError past 10^6.
std::size_t term_count(int dim, int max_degree);

MultiIndexSet build_index_set(int dim, int max_degree);

struct UniformMarginal {
  double lo = -1.0;
  double hi = 1.0;
};

/// Independent uniform inputs.
struct InputDistribution {
  std::vector<UniformMarginal> marginals;

  InputDistribution() = default;
  explicit InputDistribution(std::vector<UniformMarginal> m);
  /// Uniform(lo, hi) in every one of `dim` coordinates.
  static InputDistribution uniform(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(marginals.size()); }
  /// True when every coordinate lies in [lo, hi] (up to round-off).
  bool contains(const Vector& theta) const;
  /// Maps each coordinate affinely onto [-1, 1].
  Vector standardize(const Vector& theta) const;
  void validate() const;
};

/// psi_k(z) = sqrt(2k + 1) P_k(z) for k = 0..max_degree, so that
/// E[psi_a psi_b] = delta_ab under Uniform(-1, 1).
Vector legendre_orthonormal(double z, int max_degree);

/// Psi_alpha(theta) for every alpha in `set`. Warns when theta is outside the
/// distribution's support unless `warn_outside` is false.
Vector eval_basis(const Vector& theta, const MultiIndexSet& set, const InputDistribution& dist,
                  bool warn_outside = true);

/// N x P matrix with row i = eval_basis(thetas.row(i)).
Matrix design_matrix(const Matrix& thetas, const MultiIndexSet& set, const InputDistribution& dist);

struct PCEModel {
  MultiIndexSet index_set;
  InputDistribution distribution;
  /// P x n_out, row k belongs to index_set.indices[k].
  Matrix coefficients;
  double ridge = 0.0;
  /// Of the regularized normal matrix, sqrt of its eigenvalue ratio.
  double condition_number = 1.0;
  /// Leave-one-out mean squared residual (PRESS / N) over all outputs;
  /// +infinity when some sample has leverage 1.
  double loo_error = 0.0;

  Index output_dim() const { return coefficients.cols(); }
  /// Mean of every output under the input distribution.
  Vector mean() const { return coefficients.row(0).transpose(); }
};

/// Ridge least squares C = (Psi^T Psi + ridge I)^-1 Psi^T Y through an SVD of
/// Psi. thetas is N x d, outputs N x n_out. With ridge == 0 a rank-deficient
/// design (including N < P) is an error.
PCEModel fit_pce(const Matrix& thetas, const Matrix& outputs, const MultiIndexSet& set,
                 const InputDistribution& dist, double ridge);

/// C^T Psi(theta).
Vector predict(const PCEModel& model, const Vector& theta, bool warn_outside = true);

}  // namespace pgpce
