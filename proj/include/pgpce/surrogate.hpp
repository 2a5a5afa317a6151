#pragma once

#include <cstdint>
#include <vector>

#include "pgpce/clustering.hpp"
#include "pgpce/manifold.hpp"
#include "pgpce/manifold_stats.hpp"
#include "pgpce/pce.hpp"
#include "pgpce/pga.hpp"

namespace pgpce {

/// Training samples: row i of `thetas` produced `responses[i]` (m_f x n_f).
struct Dataset {
  Matrix thetas;
  std::vector<Matrix> responses;
  InputDistribution distribution;

  std::size_t size() const { return responses.size(); }
  Index input_dim() const { return thetas.cols(); }
  Index rows() const { return responses.empty() ? 0 : responses.front().rows(); }
  Index cols() const { return responses.empty() ? 0 : responses.front().cols(); }
  /// Throws DimensionError / PreconditionError on inconsistent content.
  void validate() const;
};

/// Rank-p thin SVD of one response, sign-canonical: the largest-magnitude
/// entry of every column of u is positive.
struct SVDTriple {
  OrthoFrame u;
  Vector sigma;
  OrthoFrame v;
  /// Number of singular values above rank_tol * sigma_1 for this sample.
  Index numerical_rank = 0;

  Matrix reconstruct() const;
};

struct ProjectedDataset {
  std::vector<SVDTriple> triples;
  /// Common subspace dimension, the largest numerical rank.
  Index p = 0;
};

/// Thin SVD of every response, truncated to the common rank p.
ProjectedDataset project_dataset(const Dataset& data, double rank_tol);

/// How a local model represents the middle factor of U S V^T.
enum class SingularValueModel : std::uint32_t {
  /// PCE of the p singular values; prediction U diag(max(s, 0)) V^T.
  Diagonal = 0,
  /// PCE of the p x p core U~^T y V~, where U~ and V~ are the frames the PGA
  /// reconstruction produces. Absorbs the in-subspace rotation that the
  /// exponential map does not track.
  AlignedCore = 1,
};

/// How each local PCE picks its total degree below the size-based cap.
enum class DegreeSelection : std::uint32_t {
  /// Always the cap, fallback_degree(p_max, d, N_h).
  Cap = 0,
  /// Degree in 1..cap with the smallest leave-one-out error (ties to the
  /// lower degree). Guards against clusters whose inputs are nearly
  /// degenerate in parameter space.
  LeaveOneOut = 1,
};

struct SurrogateConfig {
  double rank_tol = 1e-8;
  double variance_threshold = 0.99;
  int p_max = 2;
  double ridge = 1e-10;
  SingularValueModel sigma_model = SingularValueModel::AlignedCore;
  DegreeSelection degree_selection = DegreeSelection::LeaveOneOut;
  ClusterSelectConfig clustering;
  KarcherConfig karcher;

  void validate() const;
};

struct LocalModel {
  PGAModel pga_u;
  PGAModel pga_v;
  PCEModel pce_bu;
  PCEModel pce_bv;
  PCEModel pce_sigma;
  /// Training indices of the members, ascending.
  std::vector<std::size_t> members;
  OrthoFrame centroid_u;
};

struct TrainedSurrogate {
  std::vector<LocalModel> locals;
  /// Common subspace dimension.
  Index p = 0;
  Index rows = 0;
  Index cols = 0;
  SurrogateConfig config;
  InputDistribution distribution;
  /// All N training inputs (N x d) and their cluster labels.
  Matrix thetas;
  std::vector<int> labels;
  /// Cluster-count selection trace.
  std::vector<ClusterCountScore> curve;
  bool fallback = false;

  Index input_dim() const { return thetas.cols(); }
};

/// Full training pipeline. Failures are reported as TrainingError naming the
/// stage and cluster.
TrainedSurrogate train(const Dataset& data, const SurrogateConfig& cfg);

/// Largest s <= p_max with term_count(dim, s) <= n_members - 1 (0 if none).
int fallback_degree(int p_max, int dim, std::size_t n_members);

/// Fits a PCE of degree `max_degree`, or under LeaveOneOut the degree in
/// 1..max_degree with the smallest leave-one-out error.
PCEModel fit_pce_selected(const Matrix& thetas, const Matrix& outputs, int max_degree,
                          const InputDistribution& dist, double ridge, DegreeSelection mode);

/// Cluster of the nearest training input (Euclidean), ties to the lowest index.
int locate_cluster(const TrainedSurrogate& model, const Vector& theta);

struct Prediction {
  Matrix response;
  int cluster = 0;
  /// theta lies outside the training distribution's support.
  bool extrapolated = false;
};

Prediction predict_detailed(const TrainedSurrogate& model, const Vector& theta);
Matrix predict(const TrainedSurrogate& model, const Vector& theta);

/// ||pred - ref||_F / ||ref||_F.
double l2_error(const Matrix& pred, const Matrix& ref);
/// 1 - SS_res / SS_tot over all entries.
double r2_score(const Matrix& pred, const Matrix& ref);

struct Moments {
  Matrix mean;
  /// Entrywise sample standard deviation, N - 1 denominator.
  Matrix std;
};

/// Monte Carlo moments of the surrogate response under the input distribution.
Moments estimate_moments(const TrainedSurrogate& model, std::size_t n_samples, std::uint64_t seed);

/// Entrywise mean and (N - 1) standard deviation of a sample of fields.
Moments sample_moments(const std::vector<Matrix>& fields);

}  // namespace pgpce
