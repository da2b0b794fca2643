#include "isophasal/coord_oracle.hpp"
#include "isophasal/errors.hpp"
#include "isophasal/heat_invariant.hpp"
#include "isophasal/parallel.hpp"
#include "isophasal/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace isophasal;

namespace {

const CutoffProfile kUnit(1.0, 1.0, 1.0);

QuadratureSpec small_spec(std::size_t n = 2000, int reps = 4) {
  QuadratureSpec spec;
  spec.n_nodes = n;
  spec.n_replicates = reps;
  spec.seed = 5;
  spec.preflight = false;
  return spec;
}

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    if (const char* old = std::getenv("ISOPHASAL_THREADS")) saved_ = old, had_ = true;
    setenv("ISOPHASAL_THREADS", value, 1);
  }
  ~ThreadsEnv() {
    if (had_)
      setenv("ISOPHASAL_THREADS", saved_.c_str(), 1);
    else
      unsetenv("ISOPHASAL_THREADS");
  }

 private:
  std::string saved_;
  bool had_ = false;
};

}  // namespace

TEST(Quadrature, GaussLegendreExactForPolynomials) {
  const auto rule = gauss_legendre(5);
  double sum8 = 0.0, sum0 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum8 += rule.weights[i] * std::pow(rule.nodes[i], 8);
    sum0 += rule.weights[i];
  }
  EXPECT_NEAR(sum8, 2.0 / 9.0, 1e-14);
  EXPECT_NEAR(sum0, 2.0, 1e-14);
}

TEST(Quadrature, GaussHermiteMoments) {
  const auto rule = gauss_hermite(6);
  double m0 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    m0 += rule.weights[i];
    m4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
  }
  EXPECT_NEAR(m0, std::sqrt(std::numbers::pi), 1e-13);
  EXPECT_NEAR(m4, 0.75 * std::sqrt(std::numbers::pi), 1e-13);
}

TEST(Quadrature, TensorGaussOnCube) {
  EXPECT_EQ(tensor_order(3, 30), 3);
  EXPECT_EQ(tensor_order(9, 5), 1);
  const auto nodes = tensor_gauss(3, 4);
  ASSERT_EQ(nodes.size(), 64u);
  double acc = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    acc += nodes.weights[j] * std::pow(nodes.points(0, c), 3) * nodes.points(1, c) *
           std::pow(nodes.points(2, c), 5);
  }
  EXPECT_NEAR(acc, 0.25 * 0.5 / 6.0, 1e-15);
}

TEST(Quadrature, SobolAndShifts) {
  const auto nodes = sobol_points(4, 16);
  EXPECT_TRUE(nodes.points.col(0).isConstant(0.5));  // the origin is skipped
  double w = 0.0;
  for (double x : nodes.weights) w += x;
  EXPECT_NEAR(w, 1.0, 1e-15);
  EXPECT_TRUE(random_shift(4, 3, 1).isApprox(random_shift(4, 3, 1), 0.0));
  EXPECT_FALSE(random_shift(4, 3, 1).isApprox(random_shift(4, 3, 2)));
  const auto moved = shifted(nodes, random_shift(4, 3, 1));
  EXPECT_GE(moved.points.minCoeff(), 0.0);
  EXPECT_LT(moved.points.maxCoeff(), 1.0);
}

TEST(Quadrature, MethodNames) {
  EXPECT_EQ(parse_method("QMC"), QuadratureMethod::QMC);
  EXPECT_EQ(parse_method("tensor_gauss"), QuadratureMethod::TensorGauss);
  EXPECT_EQ(to_string(QuadratureMethod::MC), "mc");
  EXPECT_THROW(parse_method("simpson"), std::invalid_argument);
}

TEST(PairwiseSum, MatchesExactSum) {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v), 500500.0);
  EXPECT_EQ(pairwise_sum(nullptr, 0), 0.0);
  std::vector<double> tiny(1 << 16, 0.1);
  EXPECT_NEAR(pairwise_sum(tiny), 6553.6, 1e-9);
}

TEST(A2, ZeroForZeroBracketAndTrivialProfile) {
  const auto zero = integrate_a2(Bracket(6, 3), kUnit, small_spec(500, 2));
  EXPECT_LT(std::abs(zero.value), 1e-20);
  const auto flat = integrate_a2(example_bracket(ExampleBracket::Cross1),
                                 CutoffProfile(1.0, 1.0, 0.0), small_spec(500, 2));
  EXPECT_EQ(flat.value, 0.0);
  EXPECT_EQ(flat.n_active, 0u);
}

TEST(A2, RejectsEmptyNodeSets) {
  auto spec = small_spec();
  spec.n_nodes = 0;
  EXPECT_THROW(integrate_a2(Bracket(6, 3), kUnit, spec), DegenerateNodes);
  spec = small_spec();
  spec.n_replicates = 0;
  EXPECT_THROW(integrate_a2(Bracket(6, 3), kUnit, spec), DegenerateNodes);
}

TEST(A2, ActiveFractionMatchesSupportVolume) {
  const auto res = integrate_a2(example_bracket(ExampleBracket::Cross1), kUnit, small_spec(4000, 4));
  const double frac = static_cast<double>(res.n_active) / static_cast<double>(res.n_total);
  EXPECT_NEAR(frac / expected_active_fraction(6, 3), 1.0, 0.05);
  EXPECT_EQ(res.n_total, 16000u);
}

TEST(A2, DeterministicAcrossThreadCounts) {
  const auto b = example_bracket(ExampleBracket::Quaternion);
  QuadratureResult one, three;
  {
    ThreadsEnv env("1");
    one = integrate_a2(b, kUnit, small_spec(1000, 2));
  }
  {
    ThreadsEnv env("3");
    three = integrate_a2(b, kUnit, small_spec(1000, 2));
  }
  ASSERT_EQ(one.replicate_values.size(), three.replicate_values.size());
  for (std::size_t i = 0; i < one.replicate_values.size(); ++i)
    EXPECT_EQ(one.replicate_values[i], three.replicate_values[i]);
  EXPECT_EQ(one.value, three.value);
  EXPECT_EQ(one.std_error, three.std_error);
  EXPECT_EQ(one.n_active, three.n_active);
}

TEST(A2, ErrorShrinksWithNodes) {
  const auto b = example_bracket(ExampleBracket::Cross1);
  const auto coarse = integrate_a2(b, kUnit, small_spec(1000, 6));
  const auto fine = integrate_a2(b, kUnit, small_spec(8000, 6));
  EXPECT_LT(fine.std_error, coarse.std_error);
  EXPECT_NEAR(fine.value, coarse.value, 4.0 * std::hypot(fine.std_error, coarse.std_error));
}

TEST(A2, PositiveForCross1) {
  const auto res = integrate_a2(example_bracket(ExampleBracket::Cross1), kUnit, small_spec(4000, 4));
  EXPECT_GT(res.value, 3.0 * res.std_error);
  EXPECT_EQ(res.replicate_values.size(), 4u);
  EXPECT_EQ(res.seed, 5u);
}

TEST(A2, SingleReplicateHasNoErrorBar) {
  const auto res = integrate_a2(example_bracket(ExampleBracket::Cross1), kUnit, small_spec(200, 1));
  EXPECT_TRUE(std::isnan(res.std_error));
}

TEST(A2, TensorGaussUsesCoarserRuleForError) {
  QuadratureSpec spec = small_spec(4 * 4 * 4 * 4 * 4 * 4 * 4 * 4 * 4, 1);
  spec.method = QuadratureMethod::TensorGauss;
  const auto res = integrate_a2(example_bracket(ExampleBracket::Cross1), kUnit, spec);
  EXPECT_EQ(res.n_nodes, 262144u);
  EXPECT_TRUE(std::isfinite(res.std_error));
}

TEST(A2, MatchesOracleIntegrandOnFewNodes) {
  // Rebuild the MC estimate node by node from the coordinate oracle.
  const auto b = example_bracket(ExampleBracket::Cross2);
  QuadratureSpec spec = small_spec(400, 1);
  spec.method = QuadratureMethod::MC;
  const auto res = integrate_a2(b, kUnit, spec);

  const auto nodes = mc_points(9, 400, spec.seed, 0);
  const auto scheme = FDScheme::defaults(kUnit);
  const double volume = std::pow(2.0, 6) * std::pow(2.0 * std::numbers::pi, 3);
  double acc = 0.0;
  int used = 0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    Eigen::VectorXd x(6), r(3), theta(3);
    for (int i = 0; i < 6; ++i) x[i] = 2.0 * nodes.points(i, c) - 1.0;
    for (int p = 0; p < 3; ++p) {
      r[p] = nodes.points(6 + p, c);
      theta[p] = 0.7 * p;
    }
    if (x.squaredNorm() >= 1.0 || r.squaredNorm() >= 1.0) continue;
    const double f =
        scalar_invariants_fd(b, kUnit, Point::from_polar(x, r, theta), scheme).a2_integrand;
    acc += nodes.weights[j] * volume * r.prod() * f;
    ++used;
  }
  ASSERT_GT(used, 5);
  EXPECT_EQ(static_cast<std::size_t>(used), res.n_active);
  EXPECT_NEAR(res.value, acc, 1e-4 * std::abs(acc));
}

TEST(Preflight, IntegrandIsTorusInvariant) {
  for (auto which : {ExampleBracket::Cross1, ExampleBracket::Quaternion}) {
    const auto rep = theta_preflight(example_bracket(which), kUnit, 3, 8);
    EXPECT_LT(rep.max_relative_variation, 1e-8);
    EXPECT_EQ(rep.n_base, 3);
  }
  // small u-support: the oracle step must follow it
  for (double s : {4.0, 16.0}) {
    const auto rep = theta_preflight(example_bracket(ExampleBracket::Cross1), kUnit.with_scale(s));
    EXPECT_LT(rep.max_relative_variation, 1e-8) << "s = " << s;
  }
}

TEST(Isophasal, SameBracketGivesIdenticalValues) {
  const auto b = example_bracket(ExampleBracket::Cross2);
  const auto rep = isophasal_consistency(b, b, kUnit, small_spec(500, 2));
  EXPECT_EQ(rep.difference, 0.0);
  EXPECT_TRUE(rep.consistent);
}

TEST(Isophasal, RejectsNonIsospectralPair) {
  const auto b = example_bracket(ExampleBracket::Cross1);
  EXPECT_THROW(isophasal_consistency(b, b.scaled(2.0), kUnit, small_spec(100, 2)), SpectraMismatch);
  EXPECT_THROW(isophasal_consistency(b, Bracket(4, 3), kUnit, small_spec(100, 2)),
               DimensionMismatch);
}

TEST(Sweep, FitRecoversSyntheticCoefficients) {
  const int k = 3;
  const std::vector<int> degrees{2, 1, 0, -1, -2};
  const std::vector<double> c{3e-7, -1e-7, 4e-8, 2e-8, -5e-9};
  std::vector<SweepRow> rows;
  for (double s : {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0}) {
    SweepRow row;
    row.s = s;
    for (std::size_t j = 0; j < degrees.size(); ++j)
      row.result.value += c[j] * std::pow(s, degrees[j] - 2 * k);
    row.result.std_error = 1e-3 * std::abs(row.result.value);
    rows.push_back(row);
  }
  const auto fit = fit_sweep(rows, k, degrees);
  for (std::size_t j = 0; j < degrees.size(); ++j) EXPECT_NEAR(fit.coeffs[j], c[j], 1e-6 * 3e-7);
  EXPECT_LT(fit.residual, 1e-10);
  EXPECT_EQ(fit.leading_degree, 2);
  EXPECT_NEAR(fit.leading, 3e-7, 1e-13);
  EXPECT_GT(fit.leading_error, 0.0);
}

TEST(Sweep, IllConditionedInputsRejected) {
  std::vector<SweepRow> rows(3);
  for (int i = 0; i < 3; ++i) rows[i].s = 1.0 + i;
  EXPECT_THROW(fit_sweep(rows, 3), FitIllConditioned);
  EXPECT_THROW(sweep_s(Bracket(6, 3), kUnit, {1, 2, 3}, small_spec()), FitIllConditioned);
  EXPECT_THROW(sweep_s(Bracket(6, 3), kUnit, {1, 1.2, 1.4, 1.6, 1.8}, small_spec()),
               FitIllConditioned);
  std::vector<SweepRow> same(6);
  for (auto& r : same) r.s = 2.0;
  EXPECT_THROW(fit_sweep(same, 3), FitIllConditioned);
}
