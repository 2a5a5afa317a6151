#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>

#include "pgpce/clustering.hpp"
#include "pgpce/errors.hpp"
#include "test_util.hpp"

using namespace pgpce;
using pgpce::testing::random_frame;
using pgpce::testing::random_point_at;

namespace {

// Three groups of frames on G(1, 3) within radius 0.05 of the coordinate
// axes (pairwise pi/2 apart). Labels are the generating group.
struct Groups {
  std::vector<OrthoFrame> points;
  std::vector<int> labels;
};

Groups three_groups(int per_group, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> radius(0.0, 0.05);
  Groups g;
  for (int c = 0; c < 3; ++c) {
    Matrix axis = Matrix::Zero(3, 1);
    axis(c, 0) = 1.0;
    const OrthoFrame center(axis);
    for (int i = 0; i < per_group; ++i) {
      g.points.push_back(random_point_at(gen, center, radius(gen)));
      g.labels.push_back(c);
    }
  }
  return g;
}

// Same partition up to relabeling.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, back;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [f, fnew] = fwd.emplace(a[i], b[i]);
    auto [r, rnew] = back.emplace(b[i], a[i]);
    if (f->second != b[i] || r->second != a[i]) return false;
  }
  return true;
}

std::vector<OrthoFrame> scattered(std::uint64_t seed, int n, double radius) {
  std::mt19937_64 gen(seed);
  const OrthoFrame c = random_frame(gen, 6, 2);
  std::vector<OrthoFrame> pts;
  for (int i = 0; i < n; ++i) pts.push_back(random_point_at(gen, c, radius));
  return pts;
}

}  // namespace

TEST(RiemannianKMeans, RecoversWellSeparatedGroups) {
  const Groups g = three_groups(20, 11);
  const Clustering c = riemannian_kmeans(g.points, 3, 5, 4);
  EXPECT_EQ(c.num_clusters(), 3u);
  EXPECT_TRUE(same_partition(c.assignments, g.labels));
}

TEST(RiemannianKMeans, OneClusterPerPointHasZeroObjective) {
  const auto pts = scattered(1, 8, 0.3);
  const Clustering c = riemannian_kmeans(pts, 8, 3, 2);
  EXPECT_EQ(c.objective, 0.0);
  for (std::size_t s : c.cluster_sizes()) EXPECT_EQ(s, 1u);
}

TEST(RiemannianKMeans, SingleClusterIsGlobalKarcherMean) {
  const auto pts = scattered(2, 15, 0.4);
  const Clustering c = riemannian_kmeans(pts, 1, 0, 1);
  const OrthoFrame mu = karcher_mean(pts).mean;
  EXPECT_LE(geodesic_distance(c.centroids[0], mu), 1e-8);
}

TEST(RiemannianKMeans, ClusteringInvariantsHold) {
  const auto pts = scattered(3, 40, 0.5);
  const Clustering c = riemannian_kmeans(pts, 4, 9, 3);
  ASSERT_EQ(c.assignments.size(), pts.size());
  ASSERT_EQ(c.within_variances.size(), c.num_clusters());
  double objective = 0.0;
  for (std::size_t h = 0; h < c.num_clusters(); ++h) {
    std::vector<OrthoFrame> members;
    for (std::size_t i : c.members(static_cast<int>(h))) members.push_back(pts[i]);
    ASSERT_FALSE(members.empty());
    const double var = frechet_variance(members, c.centroids[h]);
    EXPECT_NEAR(c.within_variances[h], var, 1e-12);
    objective += var * static_cast<double>(members.size());
  }
  EXPECT_NEAR(c.objective, objective, 1e-10);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int a = c.assignments[i];
    ASSERT_GE(a, 0);
    ASSERT_LT(a, static_cast<int>(c.num_clusters()));
  }
}

TEST(RiemannianKMeans, ObjectiveNonIncreasingAcrossSweeps) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pts = scattered(10 + seed, 30, 0.6);
    const Clustering c = riemannian_kmeans(pts, 3, seed, 1);
    ASSERT_FALSE(c.objective_history.empty());
    for (std::size_t i = 1; i < c.objective_history.size(); ++i) {
      EXPECT_LE(c.objective_history[i], c.objective_history[i - 1] + 1e-12);
    }
  }
}

TEST(RiemannianKMeans, DeterministicGivenSeed) {
  const auto pts = scattered(4, 30, 0.5);
  const Clustering a = riemannian_kmeans(pts, 3, 42, 3);
  const Clustering b = riemannian_kmeans(pts, 3, 42, 3);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(RiemannianKMeans, RejectsBadK) {
  const auto pts = scattered(5, 4, 0.2);
  EXPECT_THROW(riemannian_kmeans(pts, 0, 0, 1), PreconditionError);
  EXPECT_THROW(riemannian_kmeans(pts, 5, 0, 1), PreconditionError);
  EXPECT_THROW(riemannian_kmeans(pts, 2, 0, 0), PreconditionError);
}

TEST(ClusterScore, TwoClusterFormula) {
  std::mt19937_64 gen(6);
  const OrthoFrame a = random_frame(gen, 5, 2);
  const double t = 0.6;
  const double sigma2 = 0.01;
  Clustering c;
  c.centroids = {a, random_point_at(gen, a, t)};
  c.within_variances = {sigma2, sigma2};
  EXPECT_NEAR(cluster_score(c), (t * t / 4) / (2 * sigma2), 1e-6);
}

TEST(ClusterScore, ZeroWithinVarianceIsInfinite) {
  std::mt19937_64 gen(7);
  Clustering c;
  const OrthoFrame a = random_frame(gen, 4, 1);
  c.centroids = {a, random_point_at(gen, a, 0.3)};
  c.within_variances = {0.0, 0.0};
  EXPECT_EQ(cluster_score(c), std::numeric_limits<double>::infinity());
}

TEST(ClusterScore, TighterClustersScoreHigher) {
  std::mt19937_64 gen(8);
  Clustering c;
  const OrthoFrame a = random_frame(gen, 4, 1);
  c.centroids = {a, random_point_at(gen, a, 0.3), random_point_at(gen, a, 0.4)};
  c.within_variances = {0.02, 0.03, 0.01};
  const double before = cluster_score(c);
  c.within_variances[1] = 0.015;
  EXPECT_GT(cluster_score(c), before);
}

TEST(ClusterScore, NeedsTwoClusters) {
  std::mt19937_64 gen(9);
  Clustering c;
  c.centroids = {random_frame(gen, 4, 1)};
  c.within_variances = {0.1};
  EXPECT_THROW(cluster_score(c), PreconditionError);
}

TEST(ClusterScore, StoredScoreMatchesRecomputation) {
  const auto pts = scattered(12, 30, 0.5);
  const Clustering c = riemannian_kmeans(pts, 3, 1, 2);
  EXPECT_NEAR(c.score, cluster_score(c), 1e-10);
}

TEST(SelectClusterCount, PicksThreeForThreeGroups) {
  const Groups g = three_groups(20, 13);
  ClusterSelectConfig cfg;
  cfg.seed = 2;
  const ClusterSelection sel = select_cluster_count(g.points, cfg);
  EXPECT_FALSE(sel.fallback);
  EXPECT_EQ(sel.clustering.num_clusters(), 3u);
  EXPECT_TRUE(same_partition(sel.clustering.assignments, g.labels));
}

TEST(SelectClusterCount, IdenticalPointsFallBackToOneCluster) {
  std::mt19937_64 gen(14);
  const std::vector<OrthoFrame> pts(12, random_frame(gen, 5, 2));
  const ClusterSelection sel = select_cluster_count(pts, ClusterSelectConfig{});
  EXPECT_TRUE(sel.fallback);
  EXPECT_EQ(sel.clustering.num_clusters(), 1u);
  for (int a : sel.clustering.assignments) EXPECT_EQ(a, 0);
}

TEST(SelectClusterCount, EveryClusterMeetsMinimumSize) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto pts = scattered(20 + seed, 40, 0.6);
    ClusterSelectConfig cfg;
    cfg.seed = seed;
    cfg.restarts = 3;
    const ClusterSelection sel = select_cluster_count(pts, cfg);
    if (sel.fallback) continue;
    for (std::size_t s : sel.clustering.cluster_sizes()) EXPECT_GE(s, 5u);
    for (const auto& entry : sel.curve) {
      if (entry.valid) {
        EXPECT_GE(entry.smallest_cluster, 5u);
      }
    }
  }
}

TEST(SelectClusterCount, RespectsMaxK) {
  const auto pts = scattered(30, 60, 0.6);
  ClusterSelectConfig cfg;
  cfg.max_k = 3;
  const ClusterSelection sel = select_cluster_count(pts, cfg);
  ASSERT_FALSE(sel.curve.empty());
  EXPECT_LE(sel.curve.back().k, 3);
  EXPECT_LE(sel.clustering.num_clusters(), 3u);
}

TEST(SelectClusterCount, RejectsTooFewPoints) {
  const auto pts = scattered(31, 9, 0.2);
  EXPECT_THROW(select_cluster_count(pts, ClusterSelectConfig{}), PreconditionError);
}
