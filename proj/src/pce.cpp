#include "pgpce/pce.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "pgpce/errors.hpp"
#include "pgpce/log.hpp"

namespace pgpce {
namespace {

constexpr std::size_t kMaxTerms = 1'000'000;

// Appends every alpha with |alpha|_1 == remaining over positions [pos, dim),
// larger leading entries first.
void enumerate_degree(std::vector<int>& alpha, int pos, int remaining,
                      std::vector<std::vector<int>>& out) {
  const int dim = static_cast<int>(alpha.size());
  if (pos == dim - 1) {
    alpha[static_cast<std::size_t>(pos)] = remaining;
    out.push_back(alpha);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    alpha[static_cast<std::size_t>(pos)] = a;
    enumerate_degree(alpha, pos + 1, remaining - a, out);
  }
  alpha[static_cast<std::size_t>(pos)] = 0;
}

std::string describe(const Vector& theta) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (Index i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << theta(i);
  os << ')';
  return os.str();
}

}  // namespace

std::size_t term_count(int dim, int max_degree) {
  if (dim < 1 || max_degree < 0) {
    throw PreconditionError("multi-index set needs dim >= 1 and degree >= 0");
  }
  // C(s + d, d) built incrementally; each partial product is itself a binomial.
  std::size_t p = 1;
  const int k = std::min(dim, max_degree);
  const int n = dim + max_degree;
  for (int i = 1; i <= k; ++i) {
    const auto num = static_cast<std::size_t>(n - k + i);
    if (p > std::numeric_limits<std::size_t>::max() / num) {
      throw PreconditionError("multi-index set too large");
    }
    p = p * num / static_cast<std::size_t>(i);
    if (p > kMaxTerms) break;
  }
  if (p > kMaxTerms) {
    throw PreconditionError("multi-index set has more than 10^6 terms (dim " +
                            std::to_string(dim) + ", degree " + std::to_string(max_degree) + ")");
  }
  return p;
}

MultiIndexSet build_index_set(int dim, int max_degree) {
  const std::size_t count = term_count(dim, max_degree);
  MultiIndexSet set{dim, max_degree, {}};
  set.indices.reserve(count);
  std::vector<int> alpha(static_cast<std::size_t>(dim), 0);
  for (int deg = 0; deg <= max_degree; ++deg) enumerate_degree(alpha, 0, deg, set.indices);
  return set;
}

InputDistribution::InputDistribution(std::vector<UniformMarginal> m) : marginals(std::move(m)) {
  validate();
}

InputDistribution InputDistribution::uniform(int dim, double lo, double hi) {
  return InputDistribution(std::vector<UniformMarginal>(static_cast<std::size_t>(dim), {lo, hi}));
}

void InputDistribution::validate() const {
  if (marginals.empty()) throw PreconditionError("input distribution has no dimensions");
  for (const auto& m : marginals) {
    if (!(std::isfinite(m.lo) && std::isfinite(m.hi) && m.lo < m.hi)) {
      throw PreconditionError("uniform marginal needs finite lo < hi");
    }
  }
}

bool InputDistribution::contains(const Vector& theta) const {
  if (theta.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const auto& m = marginals[static_cast<std::size_t>(i)];
    const double slack = 1e-12 * (m.hi - m.lo);
    if (!(theta(i) >= m.lo - slack && theta(i) <= m.hi + slack)) return false;
  }
  return true;
}

Vector InputDistribution::standardize(const Vector& theta) const {
  if (theta.size() != dim()) {
    throw DimensionError("input has " + std::to_string(theta.size()) + " coordinates, expected " +
                         std::to_string(dim()));
  }
  Vector z(theta.size());
  for (int i = 0; i < dim(); ++i) {
    const auto& m = marginals[static_cast<std::size_t>(i)];
    z(i) = 2.0 * (theta(i) - m.lo) / (m.hi - m.lo) - 1.0;
  }
  return z;
}

Vector legendre_orthonormal(double z, int max_degree) {
  Vector p(max_degree + 1);
  p(0) = 1.0;
  if (max_degree >= 1) p(1) = z;
  for (int k = 1; k < max_degree; ++k) {
    p(k + 1) = ((2.0 * k + 1.0) * z * p(k) - k * p(k - 1)) / (k + 1.0);
  }
  for (int k = 0; k <= max_degree; ++k) p(k) *= std::sqrt(2.0 * k + 1.0);
  return p;
}

Vector eval_basis(const Vector& theta, const MultiIndexSet& set, const InputDistribution& dist,
                  bool warn_outside) {
  if (theta.size() != set.dim || dist.dim() != set.dim) {
    throw DimensionError("eval_basis: input has " + std::to_string(theta.size()) +
                         " coordinates, basis expects " + std::to_string(set.dim));
  }
  if (warn_outside && !dist.contains(theta)) {
    log::warn("input " + describe(theta) + " outside the training distribution; extrapolating");
  }
  const Vector z = dist.standardize(theta);
  std::vector<Vector> psi;
  psi.reserve(static_cast<std::size_t>(set.dim));
  for (int i = 0; i < set.dim; ++i) psi.push_back(legendre_orthonormal(z(i), set.max_degree));

  Vector out(static_cast<Index>(set.size()));
  for (std::size_t k = 0; k < set.size(); ++k) {
    double v = 1.0;
    for (int i = 0; i < set.dim; ++i) {
      v *= psi[static_cast<std::size_t>(i)](set.indices[k][static_cast<std::size_t>(i)]);
    }
    out(static_cast<Index>(k)) = v;
  }
  return out;
}

Matrix design_matrix(const Matrix& thetas, const MultiIndexSet& set, const InputDistribution& dist) {
  Matrix psi(thetas.rows(), static_cast<Index>(set.size()));
  for (Index i = 0; i < thetas.rows(); ++i) {
    psi.row(i) = eval_basis(thetas.row(i).transpose(), set, dist).transpose();
  }
  return psi;
}

PCEModel fit_pce(const Matrix& thetas, const Matrix& outputs, const MultiIndexSet& set,
                 const InputDistribution& dist, double ridge) {
  if (thetas.rows() < 1) throw PreconditionError("fit_pce: need at least one sample");
  if (outputs.rows() != thetas.rows()) {
    throw DimensionError("fit_pce: " + std::to_string(thetas.rows()) + " inputs but " +
                         std::to_string(outputs.rows()) + " output rows");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw PreconditionError("fit_pce: ridge must be finite and >= 0");
  }
  if (!outputs.allFinite()) throw NumericalError("fit_pce: non-finite training outputs");

  const Matrix psi = design_matrix(thetas, set, dist);
  const Index n = psi.rows();
  const Index p = psi.cols();
  if (ridge == 0.0 && n < p) {
    throw NumericalError("fit_pce: " + std::to_string(n) + " samples for " + std::to_string(p) +
                         " terms; use ridge > 0 or a lower degree");
  }

  Eigen::JacobiSVD<Matrix> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double s_max = s.size() ? s(0) : 0.0;
  // Singular values missing from the thin SVD (n < p) are zeros.
  const double s_min = (s.size() == p) ? s(s.size() - 1) : 0.0;
  const double rank_floor = static_cast<double>(std::max(n, p)) *
                            std::numeric_limits<double>::epsilon() * s_max;

  if (ridge == 0.0 && !(s_min > rank_floor)) {
    throw NumericalError("fit_pce: rank-deficient design matrix; use ridge > 0 or a lower degree");
  }

  Vector gain(s.size());
  for (Index k = 0; k < s.size(); ++k) {
    gain(k) = (ridge == 0.0) ? 1.0 / s(k) : s(k) / (s(k) * s(k) + ridge);
  }
  PCEModel model;
  model.index_set = set;
  model.distribution = dist;
  model.ridge = ridge;
  model.coefficients = svd.matrixV() * gain.asDiagonal() * (svd.matrixU().transpose() * outputs);
  model.condition_number = std::sqrt((s_max * s_max + ridge) / (s_min * s_min + ridge));
  if (!model.coefficients.allFinite()) throw NumericalError("fit_pce: non-finite coefficients");

  // Leverages h_ii = sum_k U_ik^2 s_k^2 / (s_k^2 + ridge).
  const Vector shrink = s.array().square() / (s.array().square() + ridge);
  const Vector leverage = svd.matrixU().array().square().matrix() * shrink;
  const Matrix resid = outputs - psi * model.coefficients;
  double press = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double gap = 1.0 - leverage(i);
    if (gap <= 1e-10) {
      press = std::numeric_limits<double>::infinity();
      break;
    }
    press += resid.row(i).squaredNorm() / (gap * gap);
  }
  model.loo_error = press / static_cast<double>(n);
  return model;
}

Vector predict(const PCEModel& model, const Vector& theta, bool warn_outside) {
  return model.coefficients.transpose() *
         eval_basis(theta, model.index_set, model.distribution, warn_outside);
}

}  // namespace pgpce
