#pragma once

#include <span>

#include "pgpce/manifold.hpp"
#include "pgpce/manifold_stats.hpp"

namespace pgpce {

/// Principal geodesic analysis of one cluster: tangent-space PCA at the
/// Karcher mean. Tangent vectors are flattened column-major into length n*p.
struct PGAModel {
  OrthoFrame mean;
  /// n*p x d, orthonormal columns (principal tangent directions).
  Matrix basis;
  /// Variances along all computed directions, nonincreasing, >= 0.
  Vector eigenvalues;
  /// Sample mean of the lifted tangent vectors, length n*p.
  Vector tangent_mean;
  /// Number of retained directions, >= 1.
  Index d = 1;
  double explained_fraction = 1.0;
  /// Every member lies within geodesic radius pi/4 of the mean.
  bool concentrated = true;

  Index rows() const { return mean.ambient_dim(); }
  Index cols() const { return mean.subspace_dim(); }
  /// Direction r reshaped to n x p.
  Matrix direction(Index r) const;
};

/// Projection coefficients of a point on the retained principal directions.
struct PGACoordinates {
  Vector coeffs;
};

/// Fits a PGA model. Retains the smallest d whose cumulative eigenvalue
/// fraction reaches `variance_threshold`; d >= 1 even for zero-variance data.
PGAModel fit_pga(std::span<const OrthoFrame> points, double variance_threshold,
                 const KarcherConfig& karcher = {});

/// B_r = <basis_r, log_mean(point) - tangent_mean>, r = 1..d.
PGACoordinates project(const PGAModel& model, const OrthoFrame& point);

/// Tangent vector tangent_mean + sum_r coeffs_r basis_r at the mean.
/// coords may hold fewer than d entries (truncated reconstruction).
TangentVector tangent_at(const PGAModel& model, const PGACoordinates& coords);

/// exp_mean(tangent_at(model, coords)).
OrthoFrame reconstruct(const PGAModel& model, const PGACoordinates& coords);

}  // namespace pgpce
