#include "pgpce/manifold.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pgpce/errors.hpp"

namespace pgpce {
namespace {

// Singular values below this are treated as exact zeros in exp/log.
constexpr double kTinySingularValue = 1e-14;
// Smallest admissible singular value of base^T x in the log map.
constexpr double kCutLocusTol = 1e-12;

std::string shape_of(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// OrthoFrame

OrthoFrame::OrthoFrame(Matrix data) : data_(std::move(data)) {
  if (data_.cols() < 1 || data_.cols() > data_.rows()) {
    throw PreconditionError("OrthoFrame: need 1 <= p <= n, got " + shape_of(data_));
  }
  if (!data_.allFinite()) {
    throw PreconditionError("OrthoFrame: non-finite entries");
  }
  const double err = orthonormality_error();
  if (err > kOrthonormalityTol) {
    std::ostringstream os;
    os << "OrthoFrame: columns not orthonormal (max deviation " << err << ")";
    throw PreconditionError(os.str());
  }
}

OrthoFrame OrthoFrame::orthonormalize(const Matrix& m) {
  if (m.cols() < 1 || m.cols() > m.rows()) {
    throw PreconditionError("orthonormalize: need 1 <= p <= n, got " + shape_of(m));
  }
  const Index n = m.rows();
  const Index p = m.cols();
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(n, p);
  const auto& r = qr.matrixQR();
  for (Index j = 0; j < p; ++j) {
    if (std::abs(r(j, j)) <= 1e-14 * std::max(1.0, m.norm())) {
      throw NumericalError("orthonormalize: matrix is column rank deficient");
    }
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return OrthoFrame(std::move(q), Unchecked{});
}

OrthoFrame OrthoFrame::canonical(Index n, Index p) {
  return OrthoFrame(Matrix::Identity(n, p));
}

double OrthoFrame::orthonormality_error() const {
  const Index p = data_.cols();
  return (data_.transpose() * data_ - Matrix::Identity(p, p)).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// TangentVector

TangentVector::TangentVector(OrthoFrame base, Matrix data)
    : base_(std::move(base)), data_(std::move(data)) {
  if (data_.rows() != base_.ambient_dim() || data_.cols() != base_.subspace_dim()) {
    throw DimensionError("TangentVector: data " + shape_of(data_) +
                         " does not match base " + shape_of(base_.matrix()));
  }
  if (!data_.allFinite()) {
    throw PreconditionError("TangentVector: non-finite entries");
  }
  const double err = horizontality_error();
  if (err > kHorizontalityTol) {
    std::ostringstream os;
    os << "TangentVector: data is not horizontal at base (max |base^T v| = " << err << ")";
    throw PreconditionError(os.str());
  }
}

TangentVector TangentVector::zero(const OrthoFrame& base) {
  return TangentVector(base, Matrix::Zero(base.ambient_dim(), base.subspace_dim()));
}

TangentVector TangentVector::horizontal_part(const OrthoFrame& base, const Matrix& data) {
  if (data.rows() != base.ambient_dim() || data.cols() != base.subspace_dim()) {
    throw DimensionError("TangentVector: data " + shape_of(data) +
                         " does not match base " + shape_of(base.matrix()));
  }
  const Matrix& b = base.matrix();
  Matrix h = data - b * (b.transpose() * data);
  return TangentVector(base, std::move(h));
}

double TangentVector::horizontality_error() const {
  return (base_.matrix().transpose() * data_).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Geometry

PrincipalAngles principal_angles(const OrthoFrame& a, const OrthoFrame& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw DimensionError("principal_angles: ambient dimensions differ (" +
                         std::to_string(a.ambient_dim()) + " vs " +
                         std::to_string(b.ambient_dim()) + ")");
  }
  // Let `narrow` be the frame with fewer columns; there are p_narrow angles.
  const bool swap = b.subspace_dim() > a.subspace_dim();
  const Matrix& wide = swap ? b.matrix() : a.matrix();
  const Matrix& narrow = swap ? a.matrix() : b.matrix();
  const Index q = narrow.cols();

  const Matrix cross = wide.transpose() * narrow;
  const Matrix residual = narrow - wide * cross;
  Eigen::JacobiSVD<Matrix> cos_svd(cross);
  Eigen::JacobiSVD<Matrix> sin_svd(residual);
  const Vector& cosines = cos_svd.singularValues();  // descending
  const Vector& sines = sin_svd.singularValues();    // descending

  PrincipalAngles out;
  out.angles.resize(q);
  for (Index i = 0; i < q; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines(q - 1 - i), 0.0, 1.0);
    out.angles(i) = std::clamp(std::atan2(s, c), 0.0, std::numbers::pi / 2);
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

double geodesic_distance(const OrthoFrame& a, const OrthoFrame& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.subspace_dim() != b.subspace_dim()) {
    throw DimensionError("geodesic_distance: frames " + shape_of(a.matrix()) + " and " +
                         shape_of(b.matrix()) + " live on different Grassmannians");
  }
  // Same representative: exactly zero rather than round-off.
  if (a.matrix() == b.matrix()) return 0.0;
  return principal_angles(a, b).angles.norm();
}

TangentVector log_map(const OrthoFrame& base, const OrthoFrame& x) {
  if (base.ambient_dim() != x.ambient_dim() || base.subspace_dim() != x.subspace_dim()) {
    throw DimensionError("log_map: frames " + shape_of(base.matrix()) + " and " +
                         shape_of(x.matrix()) + " live on different Grassmannians");
  }
  const Matrix& b = base.matrix();
  const Matrix& xm = x.matrix();
  if (b == xm) return TangentVector::zero(base);
  const Matrix btx = b.transpose() * xm;

  Eigen::JacobiSVD<Matrix> inner(btx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = inner.singularValues();
  if (s(s.size() - 1) <= kCutLocusTol) throw CutLocusError();

  // M = (x - b b^T x) (b^T x)^{-1}, with the inverse applied through the SVD.
  const Matrix perp = xm - b * btx;
  const Matrix inv = inner.matrixV() * s.cwiseInverse().asDiagonal() *
                     inner.matrixU().transpose();
  const Matrix m = perp * inv;

  Eigen::JacobiSVD<Matrix> msvd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector angles = msvd.singularValues();
  for (Index i = 0; i < angles.size(); ++i) {
    angles(i) = angles(i) < kTinySingularValue ? 0.0 : std::atan(angles(i));
  }
  Matrix gamma = msvd.matrixU() * angles.asDiagonal() * msvd.matrixV().transpose();
  // Round-off can leave a ~1e-16 vertical part; strip it.
  gamma -= b * (b.transpose() * gamma);
  return TangentVector(base, std::move(gamma));
}

OrthoFrame exp_map(const OrthoFrame& base, const TangentVector& v) {
  const Matrix& anchor = v.base().matrix();
  if (anchor.rows() != base.ambient_dim() || anchor.cols() != base.subspace_dim()) {
    throw DimensionError("exp_map: tangent vector " + shape_of(v.matrix()) +
                         " does not match base " + shape_of(base.matrix()));
  }
  if ((anchor - base.matrix()).cwiseAbs().maxCoeff() > 1e-12) {
    throw PreconditionError("exp_map: tangent vector is anchored at a different base");
  }
  return exp_map(v);
}

OrthoFrame exp_map(const TangentVector& v) {
  const Matrix& b = v.base().matrix();
  if (v.matrix().squaredNorm() == 0.0) return v.base();

  Eigen::JacobiSVD<Matrix> svd(v.matrix(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Vector c(s.size());
  Vector sn(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    const double t = s(i) < kTinySingularValue ? 0.0 : s(i);
    c(i) = std::cos(t);
    sn(i) = std::sin(t);
  }
  const Matrix& u = svd.matrixU();
  const Matrix& w = svd.matrixV();
  const Matrix y = (b * w * c.asDiagonal() + u * sn.asDiagonal()) * w.transpose();
  return OrthoFrame::orthonormalize(y);
}

}  // namespace pgpce
