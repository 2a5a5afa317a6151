#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pgpce/errors.hpp"
#include "pgpce/manifold.hpp"
#include "test_util.hpp"

using namespace pgpce;
using pgpce::testing::random_frame;
using pgpce::testing::random_point_at;

namespace {

constexpr double kPi = std::numbers::pi;

OrthoFrame span_of(std::initializer_list<double> v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return OrthoFrame::orthonormalize(m);
}

}  // namespace

TEST(OrthoFrame, RejectsNonOrthonormalColumns) {
  Matrix m(3, 2);
  m << 1, 1, 0, 1, 0, 0;
  EXPECT_THROW(OrthoFrame{m}, PreconditionError);
  EXPECT_THROW(OrthoFrame{Matrix::Identity(2, 3)}, PreconditionError);
}

TEST(OrthoFrame, OrthonormalizeFixesSignsAndSpan) {
  Matrix m(3, 2);
  m << -2, 0, 0, 3, 0, 1;
  const OrthoFrame f = OrthoFrame::orthonormalize(m);
  EXPECT_LE(f.orthonormality_error(), 1e-14);
  // Positive R diagonal: first column keeps the direction of m's first column.
  EXPECT_GT(f.matrix().col(0).dot(m.col(0)), 0.0);
  EXPECT_NEAR(geodesic_distance(f, OrthoFrame::orthonormalize(m * 3.0)), 0.0, 1e-12);
}

TEST(OrthoFrame, OrthonormalizeRejectsRankDeficient) {
  Matrix m(3, 2);
  m << 1, 2, 1, 2, 1, 2;
  EXPECT_THROW(OrthoFrame::orthonormalize(m), NumericalError);
}

TEST(PrincipalAngles, IdenticalSubspacesHaveZeroAngles) {
  std::mt19937_64 gen(1);
  const OrthoFrame a = random_frame(gen, 6, 3);
  const Vector th = principal_angles(a, a).angles;
  ASSERT_EQ(th.size(), 3);
  EXPECT_LE(th.maxCoeff(), 1e-7);
}

TEST(PrincipalAngles, OrthogonalLinesInPlane) {
  const Vector th = principal_angles(span_of({1, 0}), span_of({0, 1})).angles;
  ASSERT_EQ(th.size(), 1);
  EXPECT_NEAR(th(0), kPi / 2, 1e-15);
}

TEST(PrincipalAngles, DiagonalLineIsQuarterTurn) {
  const Vector th = principal_angles(span_of({1, 0}), span_of({1, 1})).angles;
  EXPECT_NEAR(th(0), kPi / 4, 1e-15);
}

TEST(PrincipalAngles, SortedAndInRange) {
  std::mt19937_64 gen(2);
  for (int rep = 0; rep < 20; ++rep) {
    const Vector th = principal_angles(random_frame(gen, 7, 3), random_frame(gen, 7, 3)).angles;
    for (Index i = 0; i < th.size(); ++i) {
      EXPECT_GE(th(i), 0.0);
      EXPECT_LE(th(i), kPi / 2);
      if (i > 0) {
        EXPECT_GE(th(i), th(i - 1));
      }
    }
  }
}

TEST(PrincipalAngles, AmbientMismatchThrows) {
  std::mt19937_64 gen(3);
  EXPECT_THROW(principal_angles(random_frame(gen, 4, 1), random_frame(gen, 5, 1)), DimensionError);
}

TEST(GeodesicDistance, Examples) {
  EXPECT_NEAR(geodesic_distance(span_of({1, 0, 0}), span_of({0, 1, 0})), kPi / 2, 1e-15);
  std::mt19937_64 gen(4);
  const OrthoFrame a = random_frame(gen, 5, 2);
  EXPECT_EQ(geodesic_distance(a, a), 0.0);
  EXPECT_THROW(geodesic_distance(random_frame(gen, 5, 2), random_frame(gen, 5, 1)), DimensionError);
}

TEST(GeodesicDistance, SymmetricAndTriangle) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 50; ++rep) {
    const OrthoFrame c = random_frame(gen, 8, 2);
    const OrthoFrame a = random_point_at(gen, c, 0.3);
    const OrthoFrame b = random_point_at(gen, c, 0.35);
    EXPECT_NEAR(geodesic_distance(a, b), geodesic_distance(b, a), 1e-12);
    EXPECT_LE(geodesic_distance(a, b), geodesic_distance(a, c) + geodesic_distance(c, b) + 1e-9);
  }
}

TEST(GeodesicDistance, BasisInvariance) {
  std::mt19937_64 gen(6);
  for (Index p : {1, 2, 3}) {
    for (int rep = 0; rep < 20; ++rep) {
      const OrthoFrame a = random_frame(gen, 10, p);
      const OrthoFrame aq(a.matrix() * pgpce::testing::random_orthogonal(gen, p));
      EXPECT_LE(geodesic_distance(a, aq), 1e-10);
    }
  }
}

TEST(TangentVector, HorizontalityEnforced) {
  std::mt19937_64 gen(7);
  const OrthoFrame b = random_frame(gen, 5, 2);
  EXPECT_THROW(TangentVector(b, b.matrix()), PreconditionError);
  EXPECT_THROW(TangentVector(b, Matrix::Zero(5, 3)), DimensionError);
  const TangentVector h = TangentVector::horizontal_part(b, pgpce::testing::gaussian(gen, 5, 2));
  EXPECT_LE(h.horizontality_error(), 1e-14);
}

TEST(LogMap, OfBaseIsZero) {
  std::mt19937_64 gen(8);
  const OrthoFrame x = random_frame(gen, 6, 2);
  EXPECT_LE(log_map(x, x).matrix().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(LogMap, CutLocusThrowsWithMessage) {
  try {
    log_map(span_of({1, 0, 0}), span_of({0, 0, 1}));
    FAIL() << "expected CutLocusError";
  } catch (const CutLocusError& e) {
    EXPECT_STREQ(e.what(), "log map undefined: subspaces contain orthogonal directions");
  }
}

TEST(LogMap, NormEqualsGeodesicDistance) {
  std::mt19937_64 gen(9);
  for (Index n : {3, 10, 50}) {
    for (Index p : {1, 2, 3}) {
      if (p >= n) continue;
      for (int rep = 0; rep < 10; ++rep) {
        const OrthoFrame b = random_frame(gen, n, p);
        const OrthoFrame x = random_frame(gen, n, p);
        double d = geodesic_distance(b, x);
        if (d >= 0.5 * kPi * std::sqrt(static_cast<double>(p)) - 0.05) continue;
        try {
          EXPECT_NEAR(log_map(b, x).norm(), d, 1e-8);
        } catch (const CutLocusError&) {
        }
      }
    }
  }
}

TEST(ExpMap, ZeroVectorReturnsBase) {
  std::mt19937_64 gen(10);
  const OrthoFrame b = random_frame(gen, 7, 3);
  const OrthoFrame e = exp_map(b, TangentVector::zero(b));
  EXPECT_LE((e.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ExpMap, RejectsForeignTangentVector) {
  std::mt19937_64 gen(11);
  const OrthoFrame b = random_frame(gen, 5, 2);
  const OrthoFrame c = random_frame(gen, 5, 2);
  EXPECT_THROW(exp_map(c, TangentVector::zero(b)), PreconditionError);
}

TEST(ExpMap, ConstantSpeed) {
  std::mt19937_64 gen(12);
  for (int rep = 0; rep < 30; ++rep) {
    const OrthoFrame b = random_frame(gen, 9, 2);
    const Matrix v = pgpce::testing::random_direction(gen, b);
    for (double t : {1e-6, 0.1, 0.5, kPi / 4}) {
      const OrthoFrame x = exp_map(TangentVector(b, t * v));
      EXPECT_LE(x.orthonormality_error(), 1e-10);
      EXPECT_NEAR(geodesic_distance(b, x), t, 1e-8);
    }
  }
}

TEST(ExpLog, RoundTripWithinQuarterBall) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> radius(0.0, kPi / 4 - 1e-3);
  int pairs = 0;
  for (Index n : {3, 10, 50}) {
    for (Index p : {1, 2, 3}) {
      if (p >= n) continue;
      for (int rep = 0; rep < 15; ++rep) {
        const OrthoFrame b = random_frame(gen, n, p);
        const OrthoFrame x = random_point_at(gen, b, radius(gen));
        const OrthoFrame back = exp_map(log_map(b, x));
        EXPECT_LE(geodesic_distance(back, x), 1e-8);
        EXPECT_LE(back.orthonormality_error(), 1e-10);
        ++pairs;
      }
    }
  }
  EXPECT_GE(pairs, 100);
}

TEST(ExpLog, LogOfExpRecoversTangentVector) {
  std::mt19937_64 gen(14);
  for (int rep = 0; rep < 20; ++rep) {
    const OrthoFrame b = random_frame(gen, 12, 3);
    const Matrix v = 0.6 * pgpce::testing::random_direction(gen, b);
    const TangentVector back = log_map(b, exp_map(TangentVector(b, v)));
    EXPECT_LE((back.matrix() - v).norm(), 1e-9);
  }
}
