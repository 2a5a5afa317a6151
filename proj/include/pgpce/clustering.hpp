#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pgpce/manifold.hpp"
#include "pgpce/manifold_stats.hpp"

namespace pgpce {

/// Hard partition of Grassmann points with Karcher-mean centroids.
struct Clustering {
  std::vector<int> assignments;
  std::vector<OrthoFrame> centroids;
  /// Frechet variance of each cluster's members at its centroid.
  std::vector<double> within_variances;
  /// Separation score of the partition; 0 for a single cluster.
  double score = 0.0;
  /// K-means objective J = sum_j d^2(U_j, mu_{c(j)}).
  double objective = 0.0;
  /// J after every centroid update of the winning run.
  std::vector<double> objective_history;

  std::size_t num_clusters() const { return centroids.size(); }
  std::vector<std::size_t> cluster_sizes() const;
  std::vector<std::size_t> members(int cluster) const;
};

struct ClusterSelectConfig {
  int min_cluster_size = 5;
  int k_start = 2;
  std::optional<int> max_k;
  int restarts = 8;
  std::uint64_t seed = 0;
  KarcherConfig karcher;

  void validate() const;
};

/// Score of one candidate cluster count.
struct ClusterCountScore {
  int k = 0;
  double score = 0.0;
  double objective = 0.0;
  std::size_t smallest_cluster = 0;
  /// False for the terminating k whose smallest cluster was too small.
  bool valid = false;
};

struct ClusterSelection {
  Clustering clustering;
  std::vector<ClusterCountScore> curve;
  /// Set when no k >= k_start was valid and the single-cluster partition was
  /// returned instead.
  bool fallback = false;
};

/// Riemannian K-means under geodesic distance. Seeds with k-means++ style
/// D^2 sampling, alternates nearest-centroid assignment (ties to the lowest
/// centroid index) with Karcher-mean updates, and keeps the best of
/// `restarts` runs by objective. Deterministic for a given seed.
Clustering riemannian_kmeans(std::span<const OrthoFrame> points, int k, std::uint64_t seed,
                             int restarts, const KarcherConfig& karcher = {});

/// Frechet variance of the centroids about their own Karcher mean divided by
/// the sum of within-cluster variances. +infinity when that sum is zero.
double cluster_score(const Clustering& clustering, const KarcherConfig& karcher = {});

/// Grows k from cfg.k_start until some cluster has fewer than
/// cfg.min_cluster_size members (or cfg.max_k is reached) and returns the
/// valid partition with the largest score.
ClusterSelection select_cluster_count(std::span<const OrthoFrame> points,
                                      const ClusterSelectConfig& cfg);

}  // namespace pgpce
