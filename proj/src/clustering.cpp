#include "pgpce/clustering.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pgpce/errors.hpp"
#include "pgpce/log.hpp"
#include "pgpce/random.hpp"

namespace pgpce {

std::vector<std::size_t> Clustering::cluster_sizes() const {
  std::vector<std::size_t> sizes(centroids.size(), 0);
  for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

std::vector<std::size_t> Clustering::members(int cluster) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == cluster) out.push_back(i);
  }
  return out;
}

void ClusterSelectConfig::validate() const {
  if (min_cluster_size < 1) throw PreconditionError("min_cluster_size must be >= 1");
  if (k_start < 2) throw PreconditionError("k_start must be >= 2");
  if (max_k && *max_k < k_start) throw PreconditionError("max_k must be >= k_start");
  if (restarts < 1) throw PreconditionError("restarts must be >= 1");
  karcher.validate();
}

namespace {

constexpr int kMaxSweeps = 100;

using DistanceMatrix = Matrix;

DistanceMatrix pairwise_distances(std::span<const OrthoFrame> points) {
  const auto n = static_cast<Index>(points.size());
  DistanceMatrix d = DistanceMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = geodesic_distance(points[i], points[j]);
    }
  }
  return d;
}

std::vector<std::size_t> seed_centroids(const DistanceMatrix& dist, int k, Rng& rng) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<std::size_t> chosen{rng.index(n)};
  std::vector<bool> taken(n, false);
  taken[chosen[0]] = true;
  std::vector<double> weight(n);
  while (chosen.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c : chosen) best = std::min(best, dist(j, c));
      weight[j] = taken[j] ? 0.0 : best * best;
      total += weight[j];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (weight[j] <= 0.0) continue;
        acc += weight[j];
        pick = j;
        if (acc > r) break;
      }
    } else {
      // Every remaining point coincides with a seed.
      pick = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), false) - taken.begin());
    }
    taken[pick] = true;
    chosen.push_back(pick);
  }
  return chosen;
}

struct Run {
  std::vector<int> assignments;
  std::vector<OrthoFrame> centroids;
  std::vector<double> history;
  double objective = 0.0;
};

double objective_of(std::span<const OrthoFrame> points, const std::vector<int>& assignments,
                    const std::vector<OrthoFrame>& centroids) {
  double j = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = geodesic_distance(points[i], centroids[static_cast<std::size_t>(assignments[i])]);
    j += d * d;
  }
  return j;
}

Run single_run(std::span<const OrthoFrame> points, const std::vector<std::size_t>& seeds,
               const KarcherConfig& karcher) {
  const std::size_t n = points.size();
  const std::size_t k = seeds.size();
  Run run;
  for (std::size_t s : seeds) run.centroids.push_back(points[s]);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    std::vector<int> next(n);
    std::vector<double> own_dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = geodesic_distance(points[i], run.centroids[c]);
        if (d < best) {
          best = d;
          arg = static_cast<int>(c);
        }
      }
      next[i] = arg;
      own_dist[i] = best;
    }

    // Repair empty clusters with the point farthest from its centroid.
    std::vector<std::size_t> sizes(k, 0);
    for (int a : next) ++sizes[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(next[i])] > 1 && own_dist[i] > far_d) {
          far_d = own_dist[i];
          far = i;
        }
      }
      if (far == n) break;  // cannot happen while k <= n
      --sizes[static_cast<std::size_t>(next[far])];
      next[far] = static_cast<int>(c);
      own_dist[far] = 0.0;
      ++sizes[c];
      run.centroids[c] = points[far];
    }

    if (next == run.assignments) break;
    run.assignments = std::move(next);

    for (std::size_t c = 0; c < k; ++c) {
      std::vector<OrthoFrame> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (run.assignments[i] == static_cast<int>(c)) members.push_back(points[i]);
      }
      run.centroids[c] = karcher_mean(members, karcher).mean;
    }
    run.history.push_back(objective_of(points, run.assignments, run.centroids));
  }
  run.objective = run.history.empty() ? 0.0 : run.history.back();
  return run;
}

Clustering finish(std::span<const OrthoFrame> points, Run run) {
  Clustering out;
  out.assignments = std::move(run.assignments);
  out.centroids = std::move(run.centroids);
  out.objective = run.objective;
  out.objective_history = std::move(run.history);
  out.within_variances.resize(out.centroids.size());
  for (std::size_t c = 0; c < out.centroids.size(); ++c) {
    std::vector<OrthoFrame> members;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (out.assignments[i] == static_cast<int>(c)) members.push_back(points[i]);
    }
    out.within_variances[c] = frechet_variance(members, out.centroids[c]);
  }
  return out;
}

void check_points(std::span<const OrthoFrame> points) {
  if (points.empty()) throw PreconditionError("clustering: no points");
  const Index n = points.front().ambient_dim();
  const Index p = points.front().subspace_dim();
  for (const auto& pt : points) {
    if (pt.ambient_dim() != n || pt.subspace_dim() != p) {
      throw DimensionError("clustering: points live on different Grassmannians");
    }
  }
}

}  // namespace

Clustering riemannian_kmeans(std::span<const OrthoFrame> points, int k, std::uint64_t seed,
                             int restarts, const KarcherConfig& karcher) {
  check_points(points);
  if (k < 1 || static_cast<std::size_t>(k) > points.size()) {
    throw PreconditionError("riemannian_kmeans: need 1 <= k <= N");
  }
  if (restarts < 1) throw PreconditionError("riemannian_kmeans: restarts must be >= 1");

  const DistanceMatrix dist = pairwise_distances(points);
  Rng rng(seed);
  std::optional<Run> best;
  for (int r = 0; r < restarts; ++r) {
    Run run = single_run(points, seed_centroids(dist, k, rng), karcher);
    if (!best || run.objective < best->objective) best = std::move(run);
  }
  Clustering out = finish(points, std::move(*best));
  if (out.num_clusters() >= 2) out.score = cluster_score(out, karcher);
  return out;
}

double cluster_score(const Clustering& clustering, const KarcherConfig& karcher) {
  if (clustering.num_clusters() < 2) {
    throw PreconditionError("cluster_score: need at least two clusters");
  }
  double within = 0.0;
  for (double v : clustering.within_variances) within += v;
  if (within <= 0.0) return std::numeric_limits<double>::infinity();
  const OrthoFrame center = karcher_mean(clustering.centroids, karcher).mean;
  return frechet_variance(clustering.centroids, center) / within;
}

ClusterSelection select_cluster_count(std::span<const OrthoFrame> points,
                                      const ClusterSelectConfig& cfg) {
  cfg.validate();
  check_points(points);
  if (points.size() < 2 * static_cast<std::size_t>(cfg.min_cluster_size)) {
    throw PreconditionError("select_cluster_count: need N >= 2 * min_cluster_size");
  }

  ClusterSelection out;
  std::optional<Clustering> best;
  for (int k = cfg.k_start;; ++k) {
    if (cfg.max_k && k > *cfg.max_k) break;
    if (static_cast<std::size_t>(k) > points.size()) break;

    Clustering c = riemannian_kmeans(points, k, mix_seed(cfg.seed ^ static_cast<std::uint64_t>(k)),
                                     cfg.restarts, cfg.karcher);
    const auto sizes = c.cluster_sizes();
    ClusterCountScore entry;
    entry.k = k;
    entry.objective = c.objective;
    entry.smallest_cluster = *std::min_element(sizes.begin(), sizes.end());
    if (entry.smallest_cluster < static_cast<std::size_t>(cfg.min_cluster_size)) {
      out.curve.push_back(entry);
      break;
    }
    entry.score = c.score;
    entry.valid = true;
    out.curve.push_back(entry);
    if (!best || c.score > best->score) best = std::move(c);
  }

  if (best) {
    out.clustering = std::move(*best);
    return out;
  }

  log::warn("cluster selection: no valid k >= " + std::to_string(cfg.k_start) +
            ", falling back to a single cluster");
  Run single;
  single.assignments.assign(points.size(), 0);
  single.centroids.push_back(karcher_mean(points, cfg.karcher).mean);
  single.objective = objective_of(points, single.assignments, single.centroids);
  single.history.push_back(single.objective);
  out.clustering = finish(points, std::move(single));
  out.fallback = true;
  return out;
}

}  // namespace pgpce
