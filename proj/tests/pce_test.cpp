#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "pgpce/errors.hpp"
#include "pgpce/pce.hpp"

using namespace pgpce;

namespace {

Matrix uniform_samples(std::mt19937_64& gen, Index n, int d, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(n, d);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(gen);
  return m;
}

// 16-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_16.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1 - z * z) * dp * dp);
  }
}

}  // namespace

TEST(IndexSet, ConstantOnly) {
  const MultiIndexSet s = build_index_set(2, 0);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.indices[0], (std::vector<int>{0, 0}));
}

TEST(IndexSet, TermCounts) {
  EXPECT_EQ(build_index_set(2, 2).size(), 6u);
  EXPECT_EQ(term_count(2, 2), 6u);
  EXPECT_EQ(term_count(3, 3), 20u);
  EXPECT_EQ(term_count(1, 5), 6u);
}

TEST(IndexSet, GradedDescendingOrder) {
  const MultiIndexSet s = build_index_set(2, 2);
  const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(s.indices, expected);
}

TEST(IndexSet, MatchesBruteForceEnumeration) {
  for (int d = 1; d <= 4; ++d) {
    for (int deg = 0; deg <= 4; ++deg) {
      std::set<std::vector<int>> brute;
      std::vector<int> a(static_cast<std::size_t>(d), 0);
      // Odometer over {0..deg}^d.
      while (true) {
        int sum = 0;
        for (int v : a) sum += v;
        if (sum <= deg) brute.insert(a);
        std::size_t i = 0;
        while (i < a.size() && ++a[i] > deg) a[i++] = 0;
        if (i == a.size()) break;
      }
      const MultiIndexSet s = build_index_set(d, deg);
      const std::set<std::vector<int>> got(s.indices.begin(), s.indices.end());
      EXPECT_EQ(got.size(), s.size()) << "duplicates";
      EXPECT_EQ(got, brute);
      EXPECT_EQ(s.size(), term_count(d, deg));
      EXPECT_EQ(s.indices.front(), std::vector<int>(static_cast<std::size_t>(d), 0));
    }
  }
}

TEST(IndexSet, OverflowGuard) {
  EXPECT_THROW(build_index_set(20, 20), PreconditionError);
  EXPECT_THROW(term_count(100, 10), PreconditionError);
  EXPECT_THROW(build_index_set(0, 2), PreconditionError);
  EXPECT_THROW(build_index_set(2, -1), PreconditionError);
}

TEST(Legendre, KnownValues) {
  EXPECT_NEAR(legendre_orthonormal(1.0, 1)(1), std::sqrt(3.0), 1e-15);
  const Vector v = legendre_orthonormal(0.5, 3);
  EXPECT_EQ(v(0), 1.0);
  EXPECT_NEAR(v(2), std::sqrt(5.0) * (1.5 * 0.25 - 0.5), 1e-15);
  EXPECT_NEAR(v(3), std::sqrt(7.0) * (2.5 * 0.125 - 1.5 * 0.5), 1e-15);
}

TEST(Legendre, OrthonormalUnderGaussQuadrature) {
  std::vector<double> x, w;
  gauss_legendre(16, x, w);
  Matrix gram = Matrix::Zero(7, 7);
  for (std::size_t q = 0; q < x.size(); ++q) {
    const Vector psi = legendre_orthonormal(x[q], 6);
    gram += 0.5 * w[q] * psi * psi.transpose();
  }
  EXPECT_LE((gram - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EvalBasis, ConstantTermIsOne) {
  const MultiIndexSet s = build_index_set(3, 2);
  const InputDistribution dist = InputDistribution::uniform(3, 0.0, 5.0);
  Vector theta(3);
  theta << 0.3, 4.1, 2.2;
  EXPECT_EQ(eval_basis(theta, s, dist)(0), 1.0);
  EXPECT_THROW(eval_basis(Vector::Zero(2), s, dist), DimensionError);
}

TEST(EvalBasis, ProductOfStandardizedMarginals) {
  const MultiIndexSet s = build_index_set(2, 2);
  const InputDistribution dist({{0.0, 2.0}, {10.0, 20.0}});
  Vector theta(2);
  theta << 1.5, 12.0;
  const double z1 = 0.5, z2 = -0.6;
  const Vector psi = eval_basis(theta, s, dist);
  const Vector l1 = legendre_orthonormal(z1, 2), l2 = legendre_orthonormal(z2, 2);
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_NEAR(psi(static_cast<Index>(k)), l1(s.indices[k][0]) * l2(s.indices[k][1]), 1e-14);
  }
}

TEST(InputDistribution, Validation) {
  EXPECT_THROW(InputDistribution({{1.0, 1.0}}).validate(), PreconditionError);
  EXPECT_THROW(InputDistribution{}.validate(), PreconditionError);
  const InputDistribution d = InputDistribution::uniform(2, -1, 1);
  EXPECT_TRUE(d.contains(Vector::Zero(2)));
  EXPECT_FALSE(d.contains(Vector::Constant(2, 1.5)));
}

TEST(FitPCE, ConstantOutput) {
  std::mt19937_64 gen(1);
  const Matrix th = uniform_samples(gen, 12, 2);
  const MultiIndexSet s = build_index_set(2, 2);
  const PCEModel m = fit_pce(th, Matrix::Constant(12, 1, 4.5), s, InputDistribution::uniform(2, -1, 1), 0.0);
  EXPECT_NEAR(m.coefficients(0, 0), 4.5, 1e-10);
  for (Index k = 1; k < m.coefficients.rows(); ++k) EXPECT_LE(std::abs(m.coefficients(k, 0)), 1e-10);
  EXPECT_TRUE(std::isfinite(m.condition_number));
}

TEST(FitPCE, LinearTargetExact) {
  std::mt19937_64 gen(2);
  const InputDistribution dist = InputDistribution::uniform(2, -1, 1);
  const Matrix th = uniform_samples(gen, 20, 2);
  Matrix y(20, 1);
  for (Index i = 0; i < 20; ++i) y(i, 0) = 3 * th(i, 0) - 2 * th(i, 1) + 1;
  const PCEModel m = fit_pce(th, y, build_index_set(2, 1), dist, 0.0);
  const Matrix test = uniform_samples(gen, 50, 2);
  for (Index i = 0; i < test.rows(); ++i) {
    const Vector t = test.row(i).transpose();
    EXPECT_NEAR(predict(m, t)(0), 3 * t(0) - 2 * t(1) + 1, 1e-10);
  }
  EXPECT_NEAR(m.mean()(0), 1.0, 1e-10);
}

TEST(FitPCE, QuadraticTargetAnalyticCoefficients) {
  std::mt19937_64 gen(3);
  const InputDistribution dist = InputDistribution::uniform(1, -1, 1);
  const Matrix th = uniform_samples(gen, 10, 1);
  const Matrix y = th.array().square().matrix();
  const PCEModel m = fit_pce(th, y, build_index_set(1, 2), dist, 0.0);
  // theta^2 = 1/3 + (2 / (3 sqrt 5)) psi_2.
  EXPECT_NEAR(m.coefficients(0, 0), 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(m.coefficients(1, 0), 0.0, 1e-10);
  EXPECT_NEAR(m.coefficients(2, 0), 2.0 / (3.0 * std::sqrt(5.0)), 1e-10);
  for (double t : {-0.9, -0.2, 0.4, 0.77}) {
    Vector v(1);
    v << t;
    EXPECT_NEAR(predict(m, v)(0), t * t, 1e-10);
  }
}

TEST(FitPCE, PolynomialExactnessProperty) {
  std::mt19937_64 gen(4);
  for (int d = 1; d <= 3; ++d) {
    for (int deg = 1; deg <= 3; ++deg) {
      const InputDistribution dist = InputDistribution::uniform(d, -2.0, 3.0);
      const MultiIndexSet s = build_index_set(d, deg);
      const Index n = static_cast<Index>(2 * s.size());
      // Random polynomial of total degree deg in the raw inputs.
      std::normal_distribution<double> g(0.0, 1.0);
      std::vector<double> coef(s.size());
      for (double& c : coef) c = g(gen);
      auto target = [&](const Vector& t) {
        double y = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
          double term = coef[k];
          for (int i = 0; i < d; ++i) term *= std::pow(t(i), s.indices[k][static_cast<std::size_t>(i)]);
          y += term;
        }
        return y;
      };
      const Matrix th = uniform_samples(gen, n, d, -2.0, 3.0);
      Matrix y(n, 1);
      for (Index i = 0; i < n; ++i) y(i, 0) = target(th.row(i).transpose());
      const PCEModel m = fit_pce(th, y, s, dist, 0.0);
      const Matrix test = uniform_samples(gen, 100, d, -2.0, 3.0);
      double worst = 0.0;
      for (Index i = 0; i < test.rows(); ++i) {
        const Vector t = test.row(i).transpose();
        worst = std::max(worst, std::abs(predict(m, t)(0) - target(t)));
      }
      EXPECT_LE(worst, 1e-8) << "d = " << d << ", degree = " << deg;
    }
  }
}

TEST(FitPCE, RidgeConvergesToLeastSquares) {
  std::mt19937_64 gen(5);
  const InputDistribution dist = InputDistribution::uniform(2, -1, 1);
  const Matrix th = uniform_samples(gen, 30, 2);
  Matrix y(30, 2);
  for (Index i = 0; i < 30; ++i) {
    y(i, 0) = std::sin(th(i, 0)) + th(i, 1);
    y(i, 1) = std::exp(th(i, 1));
  }
  const MultiIndexSet s = build_index_set(2, 3);
  const PCEModel ols = fit_pce(th, y, s, dist, 0.0);
  const PCEModel ridge = fit_pce(th, y, s, dist, 1e-12);
  EXPECT_LE((ols.coefficients - ridge.coefficients).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(ridge.ridge, 1e-12);
}

TEST(FitPCE, UnderdeterminedNeedsRidge) {
  std::mt19937_64 gen(6);
  const InputDistribution dist = InputDistribution::uniform(2, -1, 1);
  const Matrix th = uniform_samples(gen, 4, 2);
  const MultiIndexSet s = build_index_set(2, 2);
  try {
    fit_pce(th, Matrix::Ones(4, 1), s, dist, 0.0);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("ridge"), std::string::npos);
  }
  const PCEModel m = fit_pce(th, Matrix::Ones(4, 1), s, dist, 1e-6);
  EXPECT_TRUE(m.coefficients.allFinite());
}

TEST(FitPCE, RankDeficientDesignRejected) {
  // All samples share theta_2, so the design has dependent columns.
  Matrix th(6, 2);
  th << -0.9, 0.3, -0.4, 0.3, 0.0, 0.3, 0.2, 0.3, 0.6, 0.3, 0.95, 0.3;
  EXPECT_THROW(fit_pce(th, Matrix::Ones(6, 1), build_index_set(2, 1),
                       InputDistribution::uniform(2, -1, 1), 0.0),
               NumericalError);
}

TEST(FitPCE, LeaveOneOutMatchesRefits) {
  std::mt19937_64 gen(7);
  const InputDistribution dist = InputDistribution::uniform(1, -1, 1);
  const Index n = 12;
  const Matrix th = uniform_samples(gen, n, 1);
  Matrix y(n, 1);
  for (Index i = 0; i < n; ++i) y(i, 0) = std::cos(2 * th(i, 0));
  const MultiIndexSet s = build_index_set(1, 3);
  const PCEModel m = fit_pce(th, y, s, dist, 0.0);
  double press = 0.0;
  for (Index i = 0; i < n; ++i) {
    Matrix th_i(n - 1, 1), y_i(n - 1, 1);
    for (Index j = 0, r = 0; j < n; ++j) {
      if (j == i) continue;
      th_i(r, 0) = th(j, 0);
      y_i(r++, 0) = y(j, 0);
    }
    const PCEModel mi = fit_pce(th_i, y_i, s, dist, 0.0);
    const double e = predict(mi, th.row(i).transpose())(0) - y(i, 0);
    press += e * e;
  }
  EXPECT_NEAR(m.loo_error, press / n, 1e-10 + 1e-8 * press / n);
}

TEST(FitPCE, ShapeAndValueChecks) {
  const InputDistribution dist = InputDistribution::uniform(1, -1, 1);
  const MultiIndexSet s = build_index_set(1, 1);
  EXPECT_THROW(fit_pce(Matrix::Zero(3, 1), Matrix::Zero(2, 1), s, dist, 0.0), DimensionError);
  EXPECT_THROW(fit_pce(Matrix::Zero(3, 1), Matrix::Zero(3, 1), s, dist, -1.0), PreconditionError);
  Matrix y = Matrix::Zero(3, 1);
  y(1, 0) = std::nan("");
  Matrix th(3, 1);
  th << -0.5, 0.0, 0.5;
  EXPECT_THROW(fit_pce(th, y, s, dist, 0.0), NumericalError);
}
