#include "pgpce/manifold_stats.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <numbers>
#include <sstream>

#include "pgpce/errors.hpp"

namespace pgpce {

void KarcherConfig::validate() const {
  if (max_iters < 1) throw PreconditionError("KarcherConfig: max_iters must be >= 1");
  if (!(step_size > 0.0 && step_size <= 1.0)) {
    throw PreconditionError("KarcherConfig: step_size must be in (0, 1]");
  }
  if (!(tol > 0.0)) throw PreconditionError("KarcherConfig: tol must be > 0");
}

namespace {

void check_shapes(std::span<const OrthoFrame> points) {
  const Index n = points.front().ambient_dim();
  const Index p = points.front().subspace_dim();
  for (const auto& pt : points) {
    if (pt.ambient_dim() != n || pt.subspace_dim() != p) {
      throw DimensionError("karcher_mean: points live on different Grassmannians");
    }
  }
}

Matrix mean_log(const OrthoFrame& mu, std::span<const OrthoFrame> points) {
  Matrix g = Matrix::Zero(mu.ambient_dim(), mu.subspace_dim());
  for (const auto& pt : points) g += log_map(mu, pt).matrix();
  return g / static_cast<double>(points.size());
}

}  // namespace

namespace {

constexpr std::size_t kMaxExtraStarts = 32;

// Leading p eigenvectors of the averaged projector (1/N) sum X X^T.
OrthoFrame extrinsic_mean(std::span<const OrthoFrame> points) {
  const Index n = points.front().ambient_dim();
  const Index p = points.front().subspace_dim();
  Matrix stacked(n, p * static_cast<Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    stacked.middleCols(p * static_cast<Index>(i), p) = points[i].matrix();
  }
  // Left singular vectors of [X_1 ... X_N] are the projector's eigenvectors.
  Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  return OrthoFrame::orthonormalize(svd.matrixU().leftCols(p));
}

// Plain gradient descent from points[init]. CutLocusError propagates.
KarcherResult descend(std::span<const OrthoFrame> points, OrthoFrame mu, std::size_t init,
                      const KarcherConfig& cfg) {
  for (int it = 0;; ++it) {
    const Matrix g = mean_log(mu, points);
    const double residual = g.norm();
    if (residual <= cfg.tol) {
      KarcherResult out{mu, residual, it, init, true};
      for (const auto& pt : points) {
        if (geodesic_distance(mu, pt) >= std::numbers::pi / 4) {
          out.within_injectivity_ball = false;
          break;
        }
      }
      return out;
    }
    if (it == cfg.max_iters) {
      std::ostringstream os;
      os << "karcher_mean: no convergence after " << cfg.max_iters << " iterations (residual "
         << residual << ")";
      throw ConvergenceError(os.str(), residual, it);
    }
    mu = exp_map(TangentVector::horizontal_part(mu, cfg.step_size * g));
  }
}

}  // namespace

KarcherResult karcher_mean(std::span<const OrthoFrame> points, const KarcherConfig& cfg) {
  cfg.validate();
  if (points.empty()) throw PreconditionError("karcher_mean: need at least one point");
  check_shapes(points);

  const std::size_t n = points.size();
  for (std::size_t init = 0; init < n; ++init) {
    KarcherResult best{points[init]};
    try {
      best = descend(points, points[init], init, cfg);
    } catch (const CutLocusError&) {
      continue;
    }
    if (best.within_injectivity_ball) return best;

    double best_var = frechet_variance(points, best.mean);
    auto consider = [&](KarcherResult r) {
      const double var = frechet_variance(points, r.mean);
      if (var < best_var) {
        best_var = var;
        best = std::move(r);
      }
    };
    // The extrinsic mean avoids saddles between data points; then evenly
    // spaced further starts among the remaining points.
    try {
      consider(descend(points, extrinsic_mean(points), init, cfg));
    } catch (const CutLocusError&) {
    } catch (const ConvergenceError&) {
    }
    const std::size_t rest = n - init - 1;
    const std::size_t extra = std::min(rest, kMaxExtraStarts);
    for (std::size_t j = 0; j < extra; ++j) {
      const std::size_t start = init + 1 + j * rest / extra;
      try {
        consider(descend(points, points[start], start, cfg));
      } catch (const CutLocusError&) {
      } catch (const ConvergenceError&) {
      }
    }
    return best;
  }
  throw NumericalError("data too spread for unique Karcher mean");
}

double frechet_variance(std::span<const OrthoFrame> points, const OrthoFrame& mean) {
  if (points.empty()) throw PreconditionError("frechet_variance: need at least one point");
  double acc = 0.0;
  for (const auto& pt : points) {
    const double d = geodesic_distance(pt, mean);
    acc += d * d;
  }
  return acc / static_cast<double>(points.size());
}

}  // namespace pgpce
