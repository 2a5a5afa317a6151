#pragma once

#include <random>

#include "pgpce/manifold.hpp"

namespace pgpce::testing {

inline Matrix gaussian(std::mt19937_64& gen, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(gen);
  return m;
}

inline OrthoFrame random_frame(std::mt19937_64& gen, Index n, Index p) {
  return OrthoFrame::orthonormalize(gaussian(gen, n, p));
}

/// Unit-norm horizontal direction at `base`.
inline Matrix random_direction(std::mt19937_64& gen, const OrthoFrame& base) {
  const Matrix& b = base.matrix();
  Matrix g = gaussian(gen, b.rows(), b.cols());
  g -= b * (b.transpose() * g);
  return g / g.norm();
}

/// Point at geodesic distance `t` (< pi/2) from base along a random direction.
inline OrthoFrame random_point_at(std::mt19937_64& gen, const OrthoFrame& base, double t) {
  return exp_map(TangentVector(base, t * random_direction(gen, base)));
}

inline Matrix random_orthogonal(std::mt19937_64& gen, Index p) {
  return OrthoFrame::orthonormalize(gaussian(gen, p, p)).matrix();
}

}  // namespace pgpce::testing
