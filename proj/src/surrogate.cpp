#include "pgpce/surrogate.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "pgpce/errors.hpp"
#include "pgpce/log.hpp"
#include "pgpce/random.hpp"

namespace pgpce {
namespace {

Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

// Runs one training stage and rewraps library errors with stage context.
template <typename F>
auto stage(const std::string& name, int cluster, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const TrainingError&) {
    throw;
  } catch (const Error& e) {
    throw TrainingError(name, cluster, e.what());
  }
}

// Streaming mean / variance (Welford).
struct Welford {
  std::size_t count = 0;
  Matrix mean;
  Matrix m2;

  void add(const Matrix& x) {
    if (count == 0) {
      mean = Matrix::Zero(x.rows(), x.cols());
      m2 = Matrix::Zero(x.rows(), x.cols());
    }
    ++count;
    const Matrix delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2.array() += delta.array() * (x - mean).array();
  }

  Moments finish() const {
    Moments out{mean, Matrix::Zero(mean.rows(), mean.cols())};
    if (count > 1) out.std = (m2.array().max(0.0) / static_cast<double>(count - 1)).sqrt().matrix();
    return out;
  }
};

Matrix sigma_target(const LocalModel& local, SingularValueModel kind, const SVDTriple& t,
                    const PGACoordinates& bu, const PGACoordinates& bv) {
  if (kind == SingularValueModel::Diagonal) return t.sigma.transpose();
  const Matrix u = reconstruct(local.pga_u, bu).matrix();
  const Matrix v = reconstruct(local.pga_v, bv).matrix();
  const Matrix core = (u.transpose() * t.u.matrix()) * t.sigma.asDiagonal() *
                      (t.v.matrix().transpose() * v);
  return flatten(core).transpose();
}

}  // namespace

void Dataset::validate() const {
  if (responses.empty()) throw PreconditionError("dataset is empty");
  if (thetas.rows() != static_cast<Index>(responses.size())) {
    throw DimensionError("dataset has " + std::to_string(thetas.rows()) + " inputs but " +
                         std::to_string(responses.size()) + " responses");
  }
  if (thetas.cols() != distribution.dim()) {
    throw DimensionError("dataset inputs have " + std::to_string(thetas.cols()) +
                         " coordinates but the distribution has " +
                         std::to_string(distribution.dim()));
  }
  distribution.validate();
  if (!thetas.allFinite()) throw PreconditionError("dataset inputs contain non-finite values");
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (responses[i].rows() != rows() || responses[i].cols() != cols()) {
      throw DimensionError("response " + std::to_string(i) + " has shape " +
                           std::to_string(responses[i].rows()) + "x" +
                           std::to_string(responses[i].cols()) + ", expected " +
                           std::to_string(rows()) + "x" + std::to_string(cols()));
    }
    if (!responses[i].allFinite()) {
      throw PreconditionError("response " + std::to_string(i) + " contains non-finite values");
    }
  }
  if (rows() == 0 || cols() == 0) throw PreconditionError("responses are empty matrices");
}

Matrix SVDTriple::reconstruct() const {
  return u.matrix() * sigma.asDiagonal() * v.matrix().transpose();
}

ProjectedDataset project_dataset(const Dataset& data, double rank_tol) {
  data.validate();
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw PreconditionError("rank_tol must be in (0, 1)");

  std::vector<Eigen::BDCSVD<Matrix>> svds;
  svds.reserve(data.size());
  std::vector<Index> ranks(data.size());
  Index p = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    svds.emplace_back(data.responses[i], Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svds.back().singularValues();
    if (!(s(0) > 0.0)) {
      throw PreconditionError("response " + std::to_string(i) + " is identically zero");
    }
    Index r = 0;
    while (r < s.size() && s(r) / s(0) > rank_tol) ++r;
    ranks[i] = r;
    p = std::max(p, r);
  }

  ProjectedDataset out;
  out.p = p;
  out.triples.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    Matrix u = svds[i].matrixU().leftCols(p);
    Matrix v = svds[i].matrixV().leftCols(p);
    for (Index k = 0; k < p; ++k) {
      Index arg = 0;
      u.col(k).cwiseAbs().maxCoeff(&arg);
      if (u(arg, k) < 0.0) {
        u.col(k) *= -1.0;
        v.col(k) *= -1.0;
      }
    }
    out.triples.push_back(SVDTriple{OrthoFrame(std::move(u)), svds[i].singularValues().head(p),
                                    OrthoFrame(std::move(v)), ranks[i]});
  }
  return out;
}

void SurrogateConfig::validate() const {
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw PreconditionError("rank_tol must be in (0, 1)");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
    throw PreconditionError("variance_threshold must be in (0, 1]");
  }
  if (p_max < 1) throw PreconditionError("p_max must be >= 1");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw PreconditionError("ridge must be >= 0");
  if (sigma_model != SingularValueModel::Diagonal && sigma_model != SingularValueModel::AlignedCore) {
    throw PreconditionError("unknown singular-value model");
  }
  if (degree_selection != DegreeSelection::Cap && degree_selection != DegreeSelection::LeaveOneOut) {
    throw PreconditionError("unknown degree selection");
  }
  if (clustering.min_cluster_size < 2) {
    throw PreconditionError("min_cluster_size must be >= 2 so every cluster supports PGA");
  }
  clustering.validate();
  karcher.validate();
}

int fallback_degree(int p_max, int dim, std::size_t n_members) {
  int s = 0;
  while (s < p_max && term_count(dim, s + 1) + 1 <= n_members) ++s;
  return s;
}

PCEModel fit_pce_selected(const Matrix& thetas, const Matrix& outputs, int max_degree,
                          const InputDistribution& dist, double ridge, DegreeSelection mode) {
  const int dim = static_cast<int>(thetas.cols());
  if (mode == DegreeSelection::Cap) {
    return fit_pce(thetas, outputs, build_index_set(dim, max_degree), dist, ridge);
  }
  // Candidate ridge weights: the configured floor, then decades up to 1.
  std::vector<double> ridges{ridge};
  for (double r = 1e-8; r <= 1.0; r *= 10.0) {
    if (r > ridge) ridges.push_back(r);
  }
  std::optional<PCEModel> best;
  std::optional<NumericalError> last_error;
  for (int s = std::min(1, max_degree); s <= max_degree; ++s) {
    const MultiIndexSet set = build_index_set(dim, s);
    for (double r : ridges) {
      try {
        PCEModel m = fit_pce(thetas, outputs, set, dist, r);
        if (!best || m.loo_error < best->loo_error) best = std::move(m);
      } catch (const NumericalError& e) {
        last_error = e;
      }
    }
  }
  if (!best) throw *last_error;
  return std::move(*best);
}

TrainedSurrogate train(const Dataset& data, const SurrogateConfig& cfg) {
  stage("configuration", -1, [&] {
    cfg.validate();
    data.validate();
  });
  if (data.size() < 2 * static_cast<std::size_t>(cfg.clustering.min_cluster_size)) {
    throw TrainingError("configuration", -1,
                        "need N >= 2 * min_cluster_size (N = " + std::to_string(data.size()) +
                            ", min_cluster_size = " +
                            std::to_string(cfg.clustering.min_cluster_size) + ")");
  }

  const ProjectedDataset proj = stage("svd projection", -1, [&] {
    return project_dataset(data, cfg.rank_tol);
  });
  std::vector<OrthoFrame> us;
  us.reserve(proj.triples.size());
  for (const auto& t : proj.triples) us.push_back(t.u);

  ClusterSelectConfig ccfg = cfg.clustering;
  ccfg.karcher = cfg.karcher;
  const ClusterSelection sel = stage("clustering", -1, [&] { return select_cluster_count(us, ccfg); });

  TrainedSurrogate model;
  model.p = proj.p;
  model.rows = data.rows();
  model.cols = data.cols();
  model.config = cfg;
  model.config.clustering.karcher = cfg.karcher;
  model.distribution = data.distribution;
  model.thetas = data.thetas;
  model.labels = sel.clustering.assignments;
  model.curve = sel.curve;
  model.fallback = sel.fallback;

  const int dim = static_cast<int>(data.input_dim());
  const auto n_clusters = static_cast<int>(sel.clustering.num_clusters());
  for (int h = 0; h < n_clusters; ++h) {
    const std::vector<std::size_t> members = sel.clustering.members(h);
    const auto nh = static_cast<Index>(members.size());
    std::vector<OrthoFrame> uh, vh;
    Matrix th(nh, dim);
    for (Index j = 0; j < nh; ++j) {
      const auto i = members[static_cast<std::size_t>(j)];
      uh.push_back(proj.triples[i].u);
      vh.push_back(proj.triples[i].v);
      th.row(j) = data.thetas.row(static_cast<Index>(i));
    }

    PGAModel pga_u = stage("PGA of U frames", h, [&] {
      return fit_pga(uh, cfg.variance_threshold, cfg.karcher);
    });
    PGAModel pga_v = stage("PGA of V frames", h, [&] {
      return fit_pga(vh, cfg.variance_threshold, cfg.karcher);
    });

    std::vector<PGACoordinates> cu, cv;
    Matrix bu(nh, pga_u.d), bv(nh, pga_v.d);
    stage("tangent projection", h, [&] {
      for (Index j = 0; j < nh; ++j) {
        cu.push_back(project(pga_u, uh[static_cast<std::size_t>(j)]));
        cv.push_back(project(pga_v, vh[static_cast<std::size_t>(j)]));
        bu.row(j) = cu.back().coeffs.transpose();
        bv.row(j) = cv.back().coeffs.transpose();
      }
    });

    const int degree = fallback_degree(cfg.p_max, dim, members.size());
    if (degree < cfg.p_max) {
      log::warn("cluster " + std::to_string(h) + " has " + std::to_string(nh) +
                " members; PCE degree capped at " + std::to_string(degree));
    }
    auto fit = [&](const Matrix& y) {
      return fit_pce_selected(th, y, degree, data.distribution, cfg.ridge, cfg.degree_selection);
    };

    LocalModel local{std::move(pga_u), std::move(pga_v), {}, {}, {}, members, sel.clustering.centroids[static_cast<std::size_t>(h)]};
    local.pce_bu = stage("PCE of U coordinates", h, [&] {
      return fit(bu);
    });
    local.pce_bv = stage("PCE of V coordinates", h, [&] {
      return fit(bv);
    });
    const Index sigma_dim = cfg.sigma_model == SingularValueModel::Diagonal ? proj.p : proj.p * proj.p;
    Matrix sig(nh, sigma_dim);
    stage("singular-value targets", h, [&] {
      for (Index j = 0; j < nh; ++j) {
        const auto k = static_cast<std::size_t>(j);
        sig.row(j) = sigma_target(local, cfg.sigma_model, proj.triples[members[k]], cu[k], cv[k]);
      }
    });
    local.pce_sigma = stage("PCE of singular values", h, [&] {
      return fit(sig);
    });
    model.locals.push_back(std::move(local));
  }
  return model;
}

int locate_cluster(const TrainedSurrogate& model, const Vector& theta) {
  if (theta.size() != model.input_dim()) {
    throw DimensionError("input has " + std::to_string(theta.size()) + " coordinates, model expects " +
                         std::to_string(model.input_dim()));
  }
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < model.thetas.rows(); ++i) {
    const double d = (model.thetas.row(i).transpose() - theta).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return model.labels[static_cast<std::size_t>(best)];
}

Prediction predict_detailed(const TrainedSurrogate& model, const Vector& theta) {
  Prediction out;
  out.cluster = locate_cluster(model, theta);
  out.extrapolated = !model.distribution.contains(theta);
  if (out.extrapolated) log::warn("prediction input outside the training distribution; extrapolating");

  const LocalModel& local = model.locals[static_cast<std::size_t>(out.cluster)];
  const PGACoordinates bu{predict(local.pce_bu, theta, false)};
  const PGACoordinates bv{predict(local.pce_bv, theta, false)};
  const Matrix u = reconstruct(local.pga_u, bu).matrix();
  const Matrix v = reconstruct(local.pga_v, bv).matrix();
  const Vector s = predict(local.pce_sigma, theta, false);
  if (model.config.sigma_model == SingularValueModel::Diagonal) {
    out.response = u * s.cwiseMax(0.0).asDiagonal() * v.transpose();
  } else {
    out.response = u * Eigen::Map<const Matrix>(s.data(), model.p, model.p) * v.transpose();
  }
  return out;
}

Matrix predict(const TrainedSurrogate& model, const Vector& theta) {
  return predict_detailed(model, theta).response;
}

double l2_error(const Matrix& pred, const Matrix& ref) {
  if (pred.rows() != ref.rows() || pred.cols() != ref.cols()) {
    throw DimensionError("l2_error: shape mismatch");
  }
  const double denom = ref.norm();
  if (!(denom > 0.0)) throw PreconditionError("l2_error: reference is zero");
  return (pred - ref).norm() / denom;
}

double r2_score(const Matrix& pred, const Matrix& ref) {
  if (pred.rows() != ref.rows() || pred.cols() != ref.cols()) {
    throw DimensionError("r2_score: shape mismatch");
  }
  const double ss_tot = (ref.array() - ref.mean()).square().sum();
  if (!(ss_tot > 0.0)) throw PreconditionError("r2_score: reference is constant");
  return 1.0 - (pred - ref).squaredNorm() / ss_tot;
}

Moments sample_moments(const std::vector<Matrix>& fields) {
  if (fields.size() < 2) throw PreconditionError("moments need at least two samples");
  Welford acc;
  for (const auto& f : fields) acc.add(f);
  return acc.finish();
}

Moments estimate_moments(const TrainedSurrogate& model, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw PreconditionError("moments need at least two samples");
  Rng rng(seed);
  Welford acc;
  Vector theta(model.distribution.dim());
  for (std::size_t k = 0; k < n_samples; ++k) {
    for (int i = 0; i < model.distribution.dim(); ++i) {
      const auto& m = model.distribution.marginals[static_cast<std::size_t>(i)];
      theta(i) = rng.uniform(m.lo, m.hi);
    }
    acc.add(predict(model, theta));
  }
  return acc.finish();
}

}  // namespace pgpce
