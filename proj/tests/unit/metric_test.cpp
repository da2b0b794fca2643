#include "isophasal/coord_oracle.hpp"
#include "isophasal/cutoff.hpp"
#include "isophasal/metric.hpp"
#include "isophasal/validation.hpp"
#include "oracles/frozen_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace isophasal;

namespace {

const CutoffProfile kUnit(1.0, 1.0, 1.0);

Eigen::MatrixXd block_rotation(int m, const Eigen::VectorXd& theta) {
  const int k = static_cast<int>(theta.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(m + 2 * k, m + 2 * k);
  for (int p = 0; p < k; ++p) {
    const double c = std::cos(theta[p]), s = std::sin(theta[p]);
    r(m + 2 * p, m + 2 * p) = c;
    r(m + 2 * p, m + 2 * p + 1) = -s;
    r(m + 2 * p + 1, m + 2 * p) = s;
    r(m + 2 * p + 1, m + 2 * p + 1) = c;
  }
  return r;
}

Point sample_point(std::mt19937_64& rng, double scale = 0.35) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Point p;
  p.x.resize(6);
  p.u.resize(6);
  for (int i = 0; i < 6; ++i) p.x[i] = u(rng), p.u[i] = u(rng);
  return p;
}

}  // namespace

TEST(Bump, MatchesSymbolicDerivatives) {
  for (int i = 0; i < 4; ++i) {
    const auto b = bump(frozen::kBumpT[i]);
    EXPECT_NEAR(b.value, frozen::kBumpValue[i], 1e-14);
    EXPECT_NEAR(b.d1, frozen::kBumpD1[i], 1e-13);
    EXPECT_NEAR(b.d2, frozen::kBumpD2[i], 1e-12);
  }
}

TEST(Bump, VanishesWithDerivativesAtAndBeyondOne) {
  for (double t : {1.0, 1.5, 10.0}) {
    const auto b = bump(t);
    EXPECT_EQ(b.value, 0.0);
    EXPECT_EQ(b.d1, 0.0);
    EXPECT_EQ(b.d2, 0.0);
  }
  const auto near = bump(1.0 - 1e-3);
  EXPECT_LT(near.value, 1e-300);
  EXPECT_LT(std::abs(near.d2), 1e-290);
}

TEST(Cutoff, ScaledProfileMatchesSymbolicPartials) {
  const CutoffProfile prof(0.8, 1.3, 0.7, 1.5);
  const auto j = prof(0.3, 0.2);
  EXPECT_NEAR(j.value, frozen::kPhiValue, 1e-14);
  EXPECT_NEAR(j.d1, frozen::kPhiD1, 1e-13);
  EXPECT_NEAR(j.d2, frozen::kPhiD2, 1e-13);
  EXPECT_NEAR(j.d11, frozen::kPhiD11, 1e-12);
  EXPECT_NEAR(j.d12, frozen::kPhiD12, 1e-12);
  EXPECT_NEAR(j.d22, frozen::kPhiD22, 1e-12);
}

TEST(Cutoff, OriginValueIsAmplitude) {
  EXPECT_DOUBLE_EQ(CutoffProfile(1.0, 1.0, 2.5)(0.0, 0.0).value, 2.5);
}

TEST(Cutoff, SupportRespectsScale) {
  const CutoffProfile prof(1.0, 1.0, 1.0, 2.0);
  EXPECT_TRUE(prof.in_support(0.5, 0.2));
  EXPECT_FALSE(prof.in_support(0.5, 0.25));  // s^2 t2 = 1
  EXPECT_FALSE(prof.in_support(1.0, 0.0));
  EXPECT_EQ(prof(0.5, 0.3).value, 0.0);
  EXPECT_NEAR(prof.u_radius(), 0.5, 1e-15);
}

TEST(Cutoff, ZeroAmplitudeIsTrivial) {
  const CutoffProfile zero(1.0, 1.0, 0.0);
  EXPECT_EQ(zero(0.1, 0.1).value, 0.0);
  EXPECT_EQ(zero(0.1, 0.1).d12, 0.0);
  EXPECT_FALSE(zero.in_support(0.1, 0.1));
}

TEST(Cutoff, RejectsInvalidParameters) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(CutoffProfile(inf, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(CutoffProfile(1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(CutoffProfile(1.0, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(CutoffProfile(1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Cutoff, SmoothAcrossSupportBoundary) {
  // Partials up to order 2 tend to zero on approach to the boundary.
  const CutoffProfile prof(1.0, 1.0, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double gap : {1e-1, 5e-2, 2e-2, 1e-2}) {
    const auto j = prof(1.0 - gap, 0.3);
    const double size = std::max({std::abs(j.value), std::abs(j.d1), std::abs(j.d11),
                                  std::abs(j.d12)});
    EXPECT_LT(size, prev);
    prev = size;
  }
  EXPECT_LT(prev, 1e-30);
}

TEST(Cutoff, PartialsAgreeWithFiniteDifferences) {
  const CutoffProfile prof(0.9, 1.2, 1.3, 1.1);
  const double t1 = 0.35, t2 = 0.4, h = 1e-5;
  const auto c = prof(t1, t2);
  EXPECT_NEAR(c.d1, (prof(t1 + h, t2).value - prof(t1 - h, t2).value) / (2 * h), 1e-8);
  EXPECT_NEAR(c.d2, (prof(t1, t2 + h).value - prof(t1, t2 - h).value) / (2 * h), 1e-8);
  EXPECT_NEAR(c.d12, (prof(t1, t2 + h).d1 - prof(t1, t2 - h).d1) / (2 * h), 1e-7);
  EXPECT_NEAR(c.d11, (prof(t1 + h, t2).d1 - prof(t1 - h, t2).d1) / (2 * h), 1e-7);
  EXPECT_NEAR(c.d22, (prof(t1, t2 + h).d2 - prof(t1, t2 - h).d2) / (2 * h), 1e-7);
}

TEST(Psi, UsesSquaredNorms) {
  Eigen::VectorXd x(2), u(2);
  x << 0.3, 0.4;
  u << 0.1, -0.2;
  const auto a = psi(kUnit, x, u);
  const auto b = kUnit(0.25, 0.05);
  EXPECT_DOUBLE_EQ(a.value, b.value);
  EXPECT_DOUBLE_EQ(a.d12, b.d12);
}

TEST(VerticalField, CounterclockwiseGenerator) {
  Eigen::VectorXd z = Eigen::Vector2d(1.0, 0.0), u(4);
  u << 1, 0, 0, 0;
  Eigen::VectorXd expect(4);
  expect << 0, 1, 0, 0;
  EXPECT_TRUE(vertical_field(z, u).isApprox(expect));
  EXPECT_TRUE(vertical_field(Eigen::Vector2d::Zero(), u).isZero(0.0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd zz(3), uu(6);
    for (int i = 0; i < 3; ++i) zz[i] = n(rng);
    for (int i = 0; i < 6; ++i) uu[i] = n(rng);
    EXPECT_NEAR(vertical_field(zz, uu).dot(uu), 0.0, 1e-14);
  }
}

TEST(Metric, IdentityOutsideSupportAndForZeroBracket) {
  const Bracket b = example_bracket(ExampleBracket::Cross1);
  Point p;
  p.x = Eigen::VectorXd::Constant(6, 0.5);  // |x|^2 = 1.5
  p.u = Eigen::VectorXd::Constant(6, 0.1);
  EXPECT_TRUE(metric_at(b, kUnit, p).isIdentity(0.0));
  std::mt19937_64 rng(3);
  const Point q = sample_point(rng);
  EXPECT_TRUE(metric_at(Bracket(6, 3), kUnit, q).isIdentity(0.0));
  EXPECT_TRUE(is_euclidean_outside(b, kUnit, 200));
}

TEST(Metric, UnitDeterminantSymmetricPositiveDefinite) {
  std::mt19937_64 rng(4);
  for (auto which : {ExampleBracket::Cross1, ExampleBracket::Cross2, ExampleBracket::Quaternion}) {
    const Bracket b = example_bracket(which);
    for (int t = 0; t < 50; ++t) {
      const Point p = sample_point(rng);
      const Eigen::MatrixXd g = metric_at(b, kUnit, p);
      EXPECT_NEAR(g.determinant(), 1.0, 1e-12);
      EXPECT_TRUE(g.isApprox(g.transpose(), 0.0));
      EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(g).info(), Eigen::Success);
      EXPECT_TRUE((g * inverse_metric_at(b, kUnit, p)).isIdentity(1e-12));
    }
  }
}

TEST(Metric, HorizontalLiftIsIsometryAndOrthogonalToFibre) {
  std::mt19937_64 rng(5);
  const Bracket b = example_bracket(ExampleBracket::Quaternion);
  const Point p = sample_point(rng);
  const Eigen::MatrixXd g = metric_at(b, kUnit, p);
  const double ps = psi(kUnit, p.x, p.u).value;
  ASSERT_GT(ps, 0.1);
  const Eigen::MatrixXd k = fibre_map(b, p.x, p.u);
  Eigen::MatrixXd lift(12, 6);
  lift.topRows(6) = Eigen::MatrixXd::Identity(6, 6);
  lift.bottomRows(6) = ps * k;
  EXPECT_TRUE((lift.transpose() * g * lift).isIdentity(1e-13));
  Eigen::MatrixXd fibre = Eigen::MatrixXd::Zero(12, 6);
  fibre.bottomRows(6) = Eigen::MatrixXd::Identity(6, 6);
  EXPECT_TRUE((lift.transpose() * g * fibre).isZero(1e-13));
}

TEST(Metric, FibreMapColumnsAreVerticalFields) {
  std::mt19937_64 rng(6);
  const Bracket b = example_bracket(ExampleBracket::Cross2);
  const Point p = sample_point(rng);
  const Eigen::MatrixXd k = fibre_map(b, p.x, p.u);
  for (int i = 0; i < 6; ++i) {
    Eigen::VectorXd ei = Eigen::VectorXd::Zero(6);
    ei[i] = 1.0;
    EXPECT_TRUE(k.col(i).isApprox(vertical_field(b.apply(p.x, ei), p.u), 1e-14));
  }
}

TEST(Metric, TorusInvariance) {
  std::mt19937_64 rng(7);
  const Bracket b = example_bracket(ExampleBracket::Cross1);
  const Point p = sample_point(rng);
  const Eigen::Vector3d theta(0.4, -1.3, 2.2);
  const Eigen::MatrixXd r = block_rotation(6, theta);
  Point q = Point::from_coords(r * p.coords(), 6);
  const Eigen::MatrixXd lhs = metric_at(b, kUnit, q);
  const Eigen::MatrixXd rhs = r * metric_at(b, kUnit, p) * r.transpose();
  EXPECT_TRUE(lhs.isApprox(rhs, 1e-13));
}

TEST(Metric, BracketSymmetryActsIsometrically) {
  // Rotations of the second R^3 factor about any axis preserve neither
  // component of Cross1 individually, but the diagonal SO(3) is conjugated by
  // Z -> A Z. The circle e^{t J} mixing (x, y) commutes with every j_1(Z).
  const Bracket b = example_bracket(ExampleBracket::Cross1);
  const double c = std::cos(0.7), s = std::sin(0.7);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
  a.topLeftCorner(3, 3) = c * Eigen::Matrix3d::Identity();
  a.topRightCorner(3, 3) = -s * Eigen::Matrix3d::Identity();
  a.bottomLeftCorner(3, 3) = s * Eigen::Matrix3d::Identity();
  a.bottomRightCorner(3, 3) = c * Eigen::Matrix3d::Identity();
  for (int p = 0; p < 3; ++p)
    ASSERT_TRUE((a.transpose() * b.component(p) * a).isApprox(b.component(p), 1e-14));
  std::mt19937_64 rng(8);
  const Point pt = sample_point(rng);
  Point q = pt;
  q.x = a * pt.x;
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(12, 12);
  d.topLeftCorner(6, 6) = a;
  EXPECT_TRUE(metric_at(b, kUnit, q).isApprox(d * metric_at(b, kUnit, pt) * d.transpose(), 1e-13));
}

TEST(Metric, DeviationBoundedByPsi) {
  std::mt19937_64 rng(9);
  const Bracket b = example_bracket(ExampleBracket::Cross1);
  for (int t = 0; t < 20; ++t) {
    const Point p = sample_point(rng);
    const double ps = psi(kUnit, p.x, p.u).value;
    const double kn = fibre_map(b, p.x, p.u).norm();
    const double dev = (metric_at(b, kUnit, p) - Eigen::MatrixXd::Identity(12, 12)).norm();
    EXPECT_LE(dev, 2.0 * ps * (1.0 + ps) * std::max(kn, kn * kn) + 1e-15);
  }
}

TEST(Metric, FlatToFirstOrderOnBoundaryShell) {
  // |x|^2 = 0.99 with R1sq = 1: G - I and its first derivatives vanish.
  const Bracket b = example_bracket(ExampleBracket::Cross1);
  Eigen::VectorXd v(12);
  v << 0.5, 0.5, 0.5, 0.4899, 0.0, 0.0, 0.2, 0.1, 0.1, 0.2, 0.1, 0.1;
  const auto field = bracket_metric_field(b, kUnit);
  EXPECT_LT((field(v) - Eigen::MatrixXd::Identity(12, 12)).norm(), 1e-35);
  FDScheme sc;
  sc.h = 1e-5;
  for (const auto& d : metric_gradient(field, v, sc)) EXPECT_LT(d.norm(), 1e-30);
}

TEST(Metric, ValidityReportOnExampleTriple) {
  for (auto which : {ExampleBracket::Cross1, ExampleBracket::Cross2, ExampleBracket::Quaternion}) {
    const auto rep = metric_validity(example_bracket(which), kUnit, 1000, 17);
    EXPECT_EQ(rep.n_points, 1000);
    EXPECT_GT(rep.n_outside, 400);
    EXPECT_LE(rep.max_det_error, 1e-12);
    EXPECT_EQ(rep.max_outside_error, 0.0);
  }
}

TEST(Point, PolarRoundTrip) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(2), r(2), th(2);
  r << 0.3, 0.7;
  th << 0.5, -2.0;
  const Point p = Point::from_polar(x, r, th);
  EXPECT_TRUE(p.r().isApprox(r, 1e-15));
  EXPECT_NEAR(p.theta()[0], 0.5, 1e-15);
  EXPECT_NEAR(std::remainder(p.theta()[1] + 2.0, 2.0 * std::numbers::pi), 0.0, 1e-15);
}
