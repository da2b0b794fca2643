#include "isophasal/heat_invariant.hpp"

#include "isophasal/coord_oracle.hpp"
#include "isophasal/errors.hpp"
#include "isophasal/frame_curvature.hpp"
#include "isophasal/metric.hpp"
#include "isophasal/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace isophasal {

namespace {

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

struct NodeSum {
  double value = 0.0;
  std::size_t active = 0;
};

NodeSum integrate_nodes(const Bracket& b, const CutoffProfile& profile, const NodeSet& nodes) {
  const int m = b.m();
  const int k = b.k();
  const double rx = profile.x_radius();
  const double ru = profile.u_radius();
  const double r_min = frame_r_min(profile);
  const double volume = std::pow(2.0 * rx, m) * std::pow(ru, k) * std::pow(2.0 * std::numbers::pi, k);
  const std::size_t n = nodes.size();
  std::vector<double> contrib(n, 0.0);
  const unsigned workers = worker_count();
  std::vector<std::size_t> active(workers, 0);
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end, unsigned w) {
        FrameEngine engine(b, profile);
        Eigen::VectorXd x(m);
        Eigen::VectorXd r(k);
        Eigen::VectorXd r_eval(k);
        for (std::size_t j = begin; j < end; ++j) {
          const auto col = static_cast<Eigen::Index>(j);
          for (int i = 0; i < m; ++i) x[i] = rx * (2.0 * nodes.points(i, col) - 1.0);
          double jac = 1.0;
          for (int p = 0; p < k; ++p) {
            r[p] = ru * nodes.points(m + p, col);
            r_eval[p] = std::max(r[p], 1.000001 * r_min);
            jac *= r[p];
          }
          if (!profile.in_support(x.squaredNorm(), r.squaredNorm())) continue;
          ++active[w];
          contrib[j] = nodes.weights[j] * volume * jac * engine.integrand(x, r_eval);
        }
      },
      workers);
  NodeSum out;
  out.value = pairwise_sum(contrib);
  for (std::size_t a : active) out.active += a;
  return out;
}

// The bracket metric pulled back along u = u' / c with c = R1 / (R2 / s), so
// that both supports have radius R1 and one isotropic step resolves them.
MetricField isotropic_field(const Bracket& b, const CutoffProfile& profile, double c) {
  const MetricField base = bracket_metric_field(b, profile);
  const int m = b.m();
  return [base, m, c](const Eigen::VectorXd& w) {
    Eigen::VectorXd v = w;
    v.tail(v.size() - m) /= c;
    Eigen::VectorXd d = Eigen::VectorXd::Ones(v.size());
    d.tail(v.size() - m).setConstant(1.0 / c);
    return (d.asDiagonal() * base(v) * d.asDiagonal()).eval();
  };
}

Eigen::VectorXd random_interior(std::mt19937_64& rng, const CutoffProfile& profile, int m, int k) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double rx = profile.x_radius();
  const double ru = profile.u_radius();
  while (true) {
    Eigen::VectorXd v(m + k);
    for (int i = 0; i < m; ++i) v[i] = rx * unit(rng);
    for (int p = 0; p < k; ++p) v[m + p] = ru * (0.55 + 0.45 * unit(rng)) * 0.5;
    if (v.head(m).squaredNorm() < 0.5 * profile.r1sq() &&
        v.tail(k).squaredNorm() < 0.5 * ru * ru)
      return v;
  }
}

}  // namespace

double expected_active_fraction(int m, int k) {
  return unit_ball_volume(m) / std::pow(2.0, m) * unit_ball_volume(k) / std::pow(2.0, k);
}

PreflightReport theta_preflight(const Bracket& b, const CutoffProfile& profile, int n_base,
                                int n_rotations, double tol, std::uint64_t seed) {
  const int m = b.m();
  const int k = b.k();
  const double c = profile.x_radius() / profile.u_radius();
  const MetricField field = isotropic_field(b, profile, c);
  FDScheme scheme;
  scheme.h = 2e-3 * profile.x_radius();
  scheme.richardson = false;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  PreflightReport rep;
  rep.n_base = n_base;
  rep.n_rotations = n_rotations;
  for (int j = 0; j < n_base; ++j) {
    const Eigen::VectorXd v = random_interior(rng, profile, m, k);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double scale = 0.0;
    for (int t = 0; t < n_rotations; ++t) {
      Eigen::VectorXd theta(k);
      for (int p = 0; p < k; ++p) theta[p] = angle(rng);
      Eigen::VectorXd w = Point::from_polar(v.head(m), v.tail(k), theta).coords();
      w.tail(2 * k) *= c;
      const double val = coord_curvature(field, w, scheme).a2_integrand;
      lo = std::min(lo, val);
      hi = std::max(hi, val);
      scale = std::max(scale, std::abs(val));
    }
    if (scale > 0.0) rep.max_relative_variation = std::max(rep.max_relative_variation, (hi - lo) / scale);
  }
  if (rep.max_relative_variation > tol) {
    std::ostringstream msg;
    msg << "a2 integrand varies by " << rep.max_relative_variation << " under torus rotations";
    throw ThetaDependenceDetected(msg.str());
  }
  return rep;
}

QuadratureResult integrate_a2(const Bracket& b, const CutoffProfile& profile,
                              const QuadratureSpec& spec) {
  if (spec.n_nodes == 0 || spec.n_replicates < 1)
    throw DegenerateNodes("quadrature needs at least one node and one replicate");
  const auto start = std::chrono::steady_clock::now();
  if (spec.preflight) theta_preflight(b, profile);
  const int dim = b.m() + b.k();

  QuadratureResult res;
  res.seed = spec.seed;
  if (spec.method == QuadratureMethod::TensorGauss) {
    // Deterministic; the error is the change from the next-coarser rule.
    const int q = tensor_order(dim, spec.n_nodes);
    const NodeSet fine = tensor_gauss(dim, q);
    const NodeSum a = integrate_nodes(b, profile, fine);
    res.value = a.value;
    res.n_nodes = fine.size();
    res.n_total = fine.size();
    res.n_active = a.active;
    res.replicate_values = {a.value};
    if (q > 1) {
      const NodeSum c = integrate_nodes(b, profile, tensor_gauss(dim, q - 1));
      res.std_error = std::abs(a.value - c.value);
    } else {
      res.std_error = std::numeric_limits<double>::quiet_NaN();
    }
  } else {
    const NodeSet base = spec.method == QuadratureMethod::QMC ? sobol_points(dim, spec.n_nodes) : NodeSet{};
    for (int rep = 0; rep < spec.n_replicates; ++rep) {
      const NodeSet nodes = spec.method == QuadratureMethod::QMC
                                ? shifted(base, random_shift(dim, spec.seed, rep))
                                : mc_points(dim, spec.n_nodes, spec.seed, rep);
      const NodeSum s = integrate_nodes(b, profile, nodes);
      res.replicate_values.push_back(s.value);
      res.n_active += s.active;
      res.n_total += nodes.size();
    }
    res.n_nodes = spec.n_nodes;
    const double r = static_cast<double>(spec.n_replicates);
    res.value = pairwise_sum(res.replicate_values) / r;
    if (spec.n_replicates > 1) {
      double ss = 0.0;
      for (double v : res.replicate_values) ss += (v - res.value) * (v - res.value);
      res.std_error = std::sqrt(ss / (r - 1.0) / r);
    } else {
      res.std_error = std::numeric_limits<double>::quiet_NaN();
    }
  }
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

SweepFit fit_sweep(const std::vector<SweepRow>& rows, int k, const std::vector<int>& degrees) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(degrees.size());
  if (n < p) throw FitIllConditioned("fewer s values than fitted exponents");
  Eigen::MatrixXd a(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double err = rows[i].result.std_error;
    const double w = (std::isfinite(err) && err > 0.0) ? 1.0 / err : 1.0;
    y[i] = w * rows[i].result.value;
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = w * std::pow(rows[i].s, degrees[j] - 2 * k);
  }
  const Eigen::VectorXd scale = a.colwise().norm().transpose();
  if ((scale.array() <= 0.0).any()) throw FitIllConditioned("empty fit column");
  const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(as);
  if (qr.rank() < p) throw FitIllConditioned("sweep design matrix is rank deficient");
  const Eigen::VectorXd sol = qr.solve(y);
  // Covariance (A^T W A)^{-1} in scaled coordinates via R^{-1}.
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_perm = rinv * rinv.transpose();
  const Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();

  SweepFit fit;
  fit.degrees = degrees;
  for (Eigen::Index j = 0; j < p; ++j) {
    fit.coeffs.push_back(sol[j] / scale[j]);
    fit.coeff_errors.push_back(std::sqrt(std::max(0.0, cov(j, j))) / scale[j]);
  }
  const double yn = y.norm();
  fit.residual = yn > 0.0 ? (as * sol - y).norm() / yn : 0.0;
  const auto top = std::max_element(degrees.begin(), degrees.end());
  const auto idx = static_cast<std::size_t>(top - degrees.begin());
  fit.leading_degree = *top;
  fit.leading = fit.coeffs[idx];
  fit.leading_error = fit.coeff_errors[idx];
  return fit;
}

SweepResult sweep_s(const Bracket& b, const CutoffProfile& profile, const std::vector<double>& s_list,
                    const QuadratureSpec& spec) {
  std::vector<double> distinct = s_list;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 5 || distinct.front() <= 0.0 || distinct.back() < 4.0 * distinct.front())
    throw FitIllConditioned("s sweep needs >= 5 distinct positive values spanning a factor of 4");
  SweepResult out;
  for (double s : s_list) out.rows.push_back({s, integrate_a2(b, profile.with_scale(s), spec)});
  out.fit = fit_sweep(out.rows, b.k());
  return out;
}

ConsistencyReport isophasal_consistency(const Bracket& b1, const Bracket& b2,
                                        const CutoffProfile& profile, const QuadratureSpec& spec) {
  if (b1.m() != b2.m() || b1.k() != b2.k()) throw DimensionMismatch("brackets differ in shape");
  if (!check_isospectral(b1, b2, 100, 1e-10).isospectral)
    throw SpectraMismatch("brackets are not isospectral");
  ConsistencyReport rep;
  rep.first = integrate_a2(b1, profile, spec);
  rep.second = integrate_a2(b2, profile, spec);
  rep.difference = rep.first.value - rep.second.value;
  rep.combined_error = std::hypot(rep.first.std_error, rep.second.std_error);
  rep.consistent = std::abs(rep.difference) <= 3.0 * rep.combined_error;
  return rep;
}

}  // namespace isophasal
