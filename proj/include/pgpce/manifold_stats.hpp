#pragma once

#include <cstddef>
#include <span>

#include "pgpce/manifold.hpp"

namespace pgpce {

/// Hyperparameters of the Riemannian gradient-descent Karcher solver.
struct KarcherConfig {
  int max_iters = 200;
  double step_size = 1.0;
  /// Stop once the Frobenius norm of the mean log vector drops to this.
  double tol = 1e-9;

  void validate() const;
};

struct KarcherResult {
  OrthoFrame mean;
  /// ||(1/N) sum_i log_mean(U_i)||_F at the returned mean.
  double residual = 0.0;
  int iterations = 0;
  /// Index of the point the successful run started from.
  std::size_t initializer = 0;
  /// All points lie within geodesic radius pi/4 of the returned mean.
  bool within_injectivity_ball = true;
};

/// Sample Karcher mean: argmin_w (1/N) sum_i d^2(U_i, w), found by
/// mu <- exp_mu(step * (1/N) sum_i log_mu(U_i)) starting from points[0].
/// If a log map fails, the solver restarts from the next point. Spread data
/// (some point beyond pi/4 of the result) can stall at a stationary point
/// that is not the minimizer, so then the extrinsic mean and up to 32 more
/// data points are tried as starts and the lowest variance wins. Throws
/// ConvergenceError after max_iters and NumericalError when every start
/// runs into the cut locus.
KarcherResult karcher_mean(std::span<const OrthoFrame> points,
                           const KarcherConfig& cfg = {});

/// Sample Frechet variance (1/N) sum_i d^2(U_i, mean).
double frechet_variance(std::span<const OrthoFrame> points, const OrthoFrame& mean);

}  // namespace pgpce
