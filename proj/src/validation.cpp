#include "isophasal/validation.hpp"

#include "isophasal/frame_curvature.hpp"
#include "isophasal/metric.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace isophasal {

namespace {

Eigen::VectorXd uniform_in_ball(std::mt19937_64& rng, int dim, double radius) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  const double rho = radius * std::pow(unif(rng), 1.0 / dim);
  return v * (rho / v.norm());
}

double rel_error(double a, double ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1e-12); }

}  // namespace

std::vector<PolarSample> interior_polar_samples(int m, int k, const CutoffProfile& profile, int n,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif;
  const double ru = profile.u_radius();
  std::vector<PolarSample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    PolarSample s;
    s.x = uniform_in_ball(rng, m, 0.9 * profile.x_radius());
    s.r.resize(k);
    s.theta.resize(k);
    for (int p = 0; p < k; ++p) {
      s.r[p] = ru * (0.1 + 0.45 * unif(rng));
      s.theta[p] = 2.0 * std::numbers::pi * unif(rng);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double riemann_symmetry_residual(const Tensor4& riem) {
  const int n = riem.extent(0);
  double scale = 0.0;
  for (std::size_t i = 0; i < riem.size(); ++i) scale = std::max(scale, std::abs(riem.data()[i]));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) {
          const double v = riem(a, b, g, d);
          worst = std::max(worst, std::abs(v + riem(b, a, g, d)));
          worst = std::max(worst, std::abs(v + riem(a, b, d, g)));
          worst = std::max(worst, std::abs(v - riem(g, d, a, b)));
          worst = std::max(worst, std::abs(v + riem(a, g, d, b) + riem(a, d, b, g)));
        }
  return worst / scale;
}

FlatnessReport flatness_check(const CutoffProfile& profile, int m, int k, int n_points,
                              std::uint64_t seed) {
  const Bracket zero(m, k);
  FlatnessReport rep;
  for (const auto& s : interior_polar_samples(m, k, profile, n_points, seed)) {
    const auto fc = frame_curvature(zero, profile, s.x, s.r);
    for (std::size_t i = 0; i < fc.riem.size(); ++i)
      rep.max_riem = std::max(rep.max_riem, std::abs(fc.riem.data()[i]));
    ++rep.n_points;
  }
  return rep;
}

double OracleComparison::max_error() const {
  return std::max({tau_error, ric_error, riem_error});
}

OracleComparison compare_with_oracle(const Bracket& b, const CutoffProfile& profile, int n_points,
                                     std::uint64_t seed, const FDScheme& scheme) {
  OracleComparison rep;
  for (const auto& s : interior_polar_samples(b.m(), b.k(), profile, n_points, seed)) {
    const auto fc = frame_curvature(b, profile, s.x, s.r);
    const auto si =
        scalar_invariants_fd(b, profile, Point::from_polar(s.x, s.r, s.theta), scheme);
    rep.tau_error = std::max(rep.tau_error, rel_error(fc.tau, si.tau));
    rep.ric_error = std::max(rep.ric_error, rel_error(fc.ric_norm_sq, si.ric_norm_sq));
    rep.riem_error = std::max(rep.riem_error, rel_error(fc.riem_norm_sq, si.riem_norm_sq));
    rep.symmetry_residual = std::max(rep.symmetry_residual, riemann_symmetry_residual(fc.riem));
    ++rep.n_points;
  }
  return rep;
}

double oracle_frame_riemann(const Bracket& b, const CutoffProfile& profile, const PolarSample& s,
                            int a, int bb, int g, int d, const FDScheme& scheme) {
  const Point p = Point::from_polar(s.x, s.r, s.theta);
  const auto cc = coord_curvature(bracket_metric_field(b, profile), p.coords(), scheme);
  const Eigen::MatrixXd e = frame_vectors(b, profile, p);
  const int n = p.dim();
  double acc = 0.0;
  for (int r = 0; r < n; ++r)
    for (int t = 0; t < n; ++t)
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu)
          acc += cc.riem(r, t, mu, nu) * e(r, a) * e(t, bb) * e(mu, g) * e(nu, d);
  return acc;
}

MetricValidity metric_validity(const Bracket& b, const CutoffProfile& profile, int n_points,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  const int m = b.m();
  const int k2 = 2 * b.k();
  const double rx = profile.x_radius();
  const double ru = profile.u_radius();
  MetricValidity rep;
  for (int i = 0; i < n_points; ++i) {
    Point p;
    if (i % 2 == 0) {
      p.x = uniform_in_ball(rng, m, rx);
      p.u = uniform_in_ball(rng, k2, ru);
    } else {
      p.x.resize(m);
      p.u.resize(k2);
      for (int j = 0; j < m; ++j) p.x[j] = rx * box(rng);
      for (int j = 0; j < k2; ++j) p.u[j] = ru * box(rng);
    }
    const auto g = metric_at(b, profile, p);
    rep.max_det_error = std::max(rep.max_det_error, std::abs(g.determinant() - 1.0));
    if (!profile.in_support(p.x.squaredNorm(), p.u.squaredNorm())) {
      const double dev =
          (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
      rep.max_outside_error = std::max(rep.max_outside_error, dev);
      ++rep.n_outside;
    }
    ++rep.n_points;
  }
  return rep;
}

}  // namespace isophasal
