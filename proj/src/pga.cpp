#include "pgpce/pga.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <numbers>
#include <string>

#include "pgpce/errors.hpp"
#include "pgpce/log.hpp"

namespace pgpce {
namespace {

// Eigenvalues at or below this (tangent std of 1e-10 rad) count as zero.
constexpr double kZeroVariance = 1e-20;
// Slack on the cumulative-fraction comparison so threshold 1.0 is reachable.
constexpr double kFractionSlack = 1e-12;

Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unflatten(const Vector& v, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// Unit horizontal direction at `mean`, or zero when G(p, p) has no tangent space.
Vector floor_direction(const OrthoFrame& mean) {
  const Matrix& b = mean.matrix();
  const Index size = b.size();
  for (Index j = 0; j < size; ++j) {
    Vector e = Vector::Zero(size);
    e(j) = 1.0;
    Matrix h = unflatten(e, b.rows(), b.cols());
    h -= b * (b.transpose() * h);
    const double norm = h.norm();
    if (norm > 0.5) return flatten(h / norm);
  }
  return Vector::Zero(size);
}

}  // namespace

Matrix PGAModel::direction(Index r) const {
  return unflatten(basis.col(r), rows(), cols());
}

PGAModel fit_pga(std::span<const OrthoFrame> points, double variance_threshold,
                 const KarcherConfig& karcher) {
  if (points.size() < 2) throw PreconditionError("fit_pga: need at least two points");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
    throw PreconditionError("fit_pga: variance_threshold must be in (0, 1]");
  }

  KarcherResult km = karcher_mean(points, karcher);
  const OrthoFrame& mu = km.mean;
  const auto n_points = static_cast<Index>(points.size());
  const Index flat = mu.matrix().size();

  Matrix lifted(n_points, flat);
  for (Index i = 0; i < n_points; ++i) {
    try {
      lifted.row(i) = flatten(log_map(mu, points[static_cast<std::size_t>(i)]).matrix()).transpose();
    } catch (const CutLocusError&) {
      throw NumericalError("fit_pga: cluster not concentrated (log map undefined at the mean)");
    }
  }
  const Vector tangent_mean = lifted.colwise().mean().transpose();
  const Matrix centered = lifted.rowwise() - tangent_mean.transpose();

  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  Vector eigenvalues = svd.singularValues().array().square() / static_cast<double>(n_points);

  PGAModel model{mu, Matrix(), eigenvalues, tangent_mean, 1, 1.0, true};
  for (const auto& pt : points) {
    if (geodesic_distance(mu, pt) >= std::numbers::pi / 4) {
      model.concentrated = false;
      break;
    }
  }
  if (!model.concentrated) {
    log::warn("fit_pga: cluster extends beyond geodesic radius pi/4 of its Karcher mean");
  }

  Index nonzero = 0;
  double total = 0.0;
  for (Index k = 0; k < eigenvalues.size(); ++k) {
    if (eigenvalues(k) > kZeroVariance) {
      ++nonzero;
      total += eigenvalues(k);
    }
  }

  if (nonzero == 0) {
    model.eigenvalues.setZero();
    model.basis = floor_direction(mu);
    model.d = 1;
    model.explained_fraction = 1.0;
    return model;
  }

  Index d = nonzero;
  double cumulative = 0.0;
  for (Index k = 0; k < nonzero; ++k) {
    cumulative += eigenvalues(k);
    if (cumulative >= (variance_threshold - kFractionSlack) * total) {
      d = k + 1;
      break;
    }
  }
  double retained = eigenvalues.head(d).sum();

  // Strip round-off vertical parts from the directions.
  Matrix basis = svd.matrixV().leftCols(d);
  const Matrix& b = mu.matrix();
  for (Index r = 0; r < d; ++r) {
    Matrix h = unflatten(basis.col(r), b.rows(), b.cols());
    h -= b * (b.transpose() * h);
    basis.col(r) = flatten(h / h.norm());
  }

  model.basis = std::move(basis);
  model.d = d;
  model.explained_fraction = std::min(1.0, retained / total);
  for (Index k = 0; k < model.eigenvalues.size(); ++k) {
    if (model.eigenvalues(k) < 0.0) model.eigenvalues(k) = 0.0;
  }
  return model;
}

PGACoordinates project(const PGAModel& model, const OrthoFrame& point) {
  if (point.ambient_dim() != model.rows() || point.subspace_dim() != model.cols()) {
    throw DimensionError("pga project: point does not match the model's Grassmannian");
  }
  const Vector lifted = flatten(log_map(model.mean, point).matrix());
  return PGACoordinates{model.basis.transpose() * (lifted - model.tangent_mean)};
}

TangentVector tangent_at(const PGAModel& model, const PGACoordinates& coords) {
  if (coords.coeffs.size() > model.d) {
    throw DimensionError("pga reconstruct: " + std::to_string(coords.coeffs.size()) +
                         " coordinates for a model with d = " + std::to_string(model.d));
  }
  Vector flat = model.tangent_mean;
  const Index used = coords.coeffs.size();
  if (used > 0) flat += model.basis.leftCols(used) * coords.coeffs;
  return TangentVector::horizontal_part(model.mean, unflatten(flat, model.rows(), model.cols()));
}

OrthoFrame reconstruct(const PGAModel& model, const PGACoordinates& coords) {
  return exp_map(tangent_at(model, coords));
}

}  // namespace pgpce
