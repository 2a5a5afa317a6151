#pragma once

// Points, tangent vectors and geodesic maps on the Grassmann manifold G(p, n).
//
// A point is stored as an n x p matrix with orthonormal columns (a Stiefel
// representative of the subspace it spans). Every function here is pure and
// the types are immutable values, so they can be shared across threads.

#include <Eigen/Core>

#include <utility>

namespace pgpce {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Column-orthonormal n x p frame representing a point on G(p, n).
class OrthoFrame {
 public:
  static constexpr double kOrthonormalityTol = 1e-10;

  /// Wraps `data`, which must already have orthonormal columns within
  /// kOrthonormalityTol. Throws PreconditionError otherwise.
  explicit OrthoFrame(Matrix data);

  /// Orthonormalizes the columns of `m` with a Householder QR step and fixes
  /// signs so that R has a positive diagonal. `m` must have full column rank.
  static OrthoFrame orthonormalize(const Matrix& m);

  /// First p columns of the n x n identity.
  static OrthoFrame canonical(Index n, Index p);

  const Matrix& matrix() const noexcept { return data_; }
  Index ambient_dim() const noexcept { return data_.rows(); }
  Index subspace_dim() const noexcept { return data_.cols(); }

  /// max |(F^T F - I)_ij|
  double orthonormality_error() const;

 private:
  struct Unchecked {};
  OrthoFrame(Matrix data, Unchecked) : data_(std::move(data)) {}

  Matrix data_;
};

/// Tangent vector at a base frame. Horizontal: base^T * data == 0.
class TangentVector {
 public:
  static constexpr double kHorizontalityTol = 1e-8;

  /// Throws DimensionError on shape mismatch and PreconditionError when the
  /// data is not horizontal at `base`.
  TangentVector(OrthoFrame base, Matrix data);

  static TangentVector zero(const OrthoFrame& base);

  /// Removes the vertical component, base * base^T * data, before wrapping.
  static TangentVector horizontal_part(const OrthoFrame& base, const Matrix& data);

  const OrthoFrame& base() const noexcept { return base_; }
  const Matrix& matrix() const noexcept { return data_; }
  double norm() const { return data_.norm(); }

  /// max |(base^T data)_ij|
  double horizontality_error() const;

 private:
  OrthoFrame base_;
  Matrix data_;
};

/// Principal angles in [0, pi/2], sorted ascending.
struct PrincipalAngles {
  Vector angles;
};

/// Principal angles between span(a) and span(b); min(p_a, p_b) of them.
/// Cosines and sines both come from SVDs and are combined with atan2, which
/// keeps full accuracy near 0 and near pi/2.
PrincipalAngles principal_angles(const OrthoFrame& a, const OrthoFrame& b);

/// Arc length sqrt(sum theta_i^2). Both frames must share n and p.
double geodesic_distance(const OrthoFrame& a, const OrthoFrame& b);

/// Logarithmic map at `base`. Throws CutLocusError if base^T x is singular.
TangentVector log_map(const OrthoFrame& base, const OrthoFrame& x);

/// Exponential map. `v` must be anchored at `base`.
OrthoFrame exp_map(const OrthoFrame& base, const TangentVector& v);

/// Exponential map at the tangent vector's own base.
OrthoFrame exp_map(const TangentVector& v);

}  // namespace pgpce
