#include "isophasal/frame_curvature.hpp"

#include "isophasal/errors.hpp"
#include "isophasal/metric.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace isophasal {

namespace {

template <std::size_t Rank>
void reset(DenseTensor<Rank>& t, const std::array<int, Rank>& extents) {
  bool same = t.size() > 0;
  for (std::size_t a = 0; a < Rank && same; ++a) same = t.extent(a) == extents[a];
  if (same)
    t.fill(0.0);
  else
    t = DenseTensor<Rank>(extents);
}

void fill_a_coeffs(const Bracket& b, const CutoffProfile& profile, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& r, ACoeffs& ac) {
  const int m = b.m();
  const int k = b.k();
  if (x.size() != m || r.size() != k) throw DimensionMismatch("a_coeffs: (x, r) has wrong size");
  ac.m = m;
  ac.k = k;
  ac.a.setZero(m, k);
  reset(ac.da_dx, {m, k, m});
  reset(ac.da_dr, {m, k, k});
  reset(ac.d2a_xx, {m, k, m, m});
  reset(ac.d2a_xr, {m, k, m, k});
  reset(ac.d2a_rr, {m, k, k, k});

  const CutoffJet phi = profile(x.squaredNorm(), r.squaredNorm());
  if (phi.value == 0.0 && phi.d1 == 0.0 && phi.d2 == 0.0 && phi.d11 == 0.0 && phi.d12 == 0.0 &&
      phi.d22 == 0.0)
    return;

  for (int p = 0; p < k; ++p) {
    const Eigen::MatrixXd& lam = b.component(p);
    for (int i = 0; i < m; ++i) {
      // L = <[x, e_i], Z_p> = sum_j x_j lam(j, i); dL/dx_j = lam(j, i).
      const double l = lam.col(i).dot(x);
      ac.a(i, p) = phi.value * l;
      for (int j = 0; j < m; ++j) {
        ac.da_dx(i, p, j) = 2.0 * x[j] * phi.d1 * l + phi.value * lam(j, i);
        for (int q = 0; q < m; ++q) {
          ac.d2a_xx(i, p, j, q) = ((j == q ? 2.0 * phi.d1 : 0.0) + 4.0 * x[j] * x[q] * phi.d11) * l +
                                  2.0 * x[j] * phi.d1 * lam(q, i) + 2.0 * x[q] * phi.d1 * lam(j, i);
        }
        for (int q = 0; q < k; ++q)
          ac.d2a_xr(i, p, j, q) = 4.0 * x[j] * r[q] * phi.d12 * l + 2.0 * r[q] * phi.d2 * lam(j, i);
      }
      for (int q = 0; q < k; ++q) {
        ac.da_dr(i, p, q) = 2.0 * r[q] * phi.d2 * l;
        for (int t = 0; t < k; ++t)
          ac.d2a_rr(i, p, q, t) = ((q == t ? 2.0 * phi.d2 : 0.0) + 4.0 * r[q] * r[t] * phi.d22) * l;
      }
    }
  }
}

void check_radii(const Eigen::VectorXd& r, double r_min) {
  for (Eigen::Index q = 0; q < r.size(); ++q)
    if (!(r[q] > r_min) || !(r[q] > 0.0)) {
      std::ostringstream msg;
      msg << "polar frame degenerate: r_" << q + 1 << " = " << r[q] << " <= r_min = " << r_min;
      throw DegeneratePoint(msg.str());
    }
}

void fill_structure_constants(const ACoeffs& ac, const Eigen::VectorXd& r, Tensor3& c) {
  const FrameLayout lay{ac.m, ac.k};
  const int n = lay.n();
  reset(c, {n, n, n});
  for (int q = 0; q < ac.k; ++q) {
    const int th = lay.theta(q);
    for (int i = 0; i < ac.m; ++i) {
      for (int j = i + 1; j < ac.m; ++j) {
        const double v = (ac.da_dx(j, q, i) - ac.da_dx(i, q, j)) * r[q];
        c(th, lay.x(i), lay.x(j)) = v;
        c(th, lay.x(j), lay.x(i)) = -v;
      }
      for (int p = 0; p < ac.k; ++p) {
        const double v = ac.da_dr(i, q, p) * r[q];
        c(th, lay.r(p), lay.x(i)) = v;
        c(th, lay.x(i), lay.r(p)) = -v;
      }
    }
    c(th, lay.r(q), th) = -1.0 / r[q];
    c(th, th, lay.r(q)) = 1.0 / r[q];
  }
}

void fill_structure_constant_derivatives(const ACoeffs& ac, const Eigen::VectorXd& r, Tensor4& dc) {
  const FrameLayout lay{ac.m, ac.k};
  const int n = lay.n();
  reset(dc, {n, n, n, n});
  for (int q = 0; q < ac.k; ++q) {
    const int th = lay.theta(q);
    for (int i = 0; i < ac.m; ++i) {
      for (int j = i + 1; j < ac.m; ++j) {
        for (int l = 0; l < ac.m; ++l) {
          const double v = (ac.d2a_xx(j, q, i, l) - ac.d2a_xx(i, q, j, l)) * r[q];
          dc(th, lay.x(i), lay.x(j), lay.x(l)) = v;
          dc(th, lay.x(j), lay.x(i), lay.x(l)) = -v;
        }
        for (int t = 0; t < ac.k; ++t) {
          double v = (ac.d2a_xr(j, q, i, t) - ac.d2a_xr(i, q, j, t)) * r[q];
          if (t == q) v += ac.da_dx(j, q, i) - ac.da_dx(i, q, j);
          dc(th, lay.x(i), lay.x(j), lay.r(t)) = v;
          dc(th, lay.x(j), lay.x(i), lay.r(t)) = -v;
        }
      }
      for (int p = 0; p < ac.k; ++p) {
        for (int l = 0; l < ac.m; ++l) {
          const double v = ac.d2a_xr(i, q, l, p) * r[q];
          dc(th, lay.r(p), lay.x(i), lay.x(l)) = v;
          dc(th, lay.x(i), lay.r(p), lay.x(l)) = -v;
        }
        for (int t = 0; t < ac.k; ++t) {
          double v = ac.d2a_rr(i, q, p, t) * r[q];
          if (t == q) v += ac.da_dr(i, q, p);
          dc(th, lay.r(p), lay.x(i), lay.r(t)) = v;
          dc(th, lay.x(i), lay.r(p), lay.r(t)) = -v;
        }
      }
    }
    const double inv_sq = 1.0 / (r[q] * r[q]);
    dc(th, lay.r(q), th, lay.r(q)) = inv_sq;
    dc(th, th, lay.r(q), lay.r(q)) = -inv_sq;
  }
}

}  // namespace

ACoeffs a_coeffs(const Bracket& b, const CutoffProfile& profile, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& r) {
  ACoeffs ac;
  fill_a_coeffs(b, profile, x, r, ac);
  return ac;
}

double frame_r_min(const CutoffProfile& profile) { return 1e-6 * profile.u_radius(); }

Tensor3 structure_constants(const ACoeffs& ac, const Eigen::VectorXd& r, double r_min) {
  if (r.size() != ac.k) throw DimensionMismatch("structure_constants: r has wrong size");
  check_radii(r, r_min);
  Tensor3 c;
  fill_structure_constants(ac, r, c);
  return c;
}

Tensor4 structure_constant_derivatives(const ACoeffs& ac, const Eigen::VectorXd& r) {
  if (r.size() != ac.k) throw DimensionMismatch("structure_constant_derivatives: r has wrong size");
  check_radii(r, 0.0);
  Tensor4 dc;
  fill_structure_constant_derivatives(ac, r, dc);
  return dc;
}

Tensor3 christoffels(const Tensor3& c) {
  const int n = c.extent(0);
  Tensor3 g({n, n, n});
  for (int ga = 0; ga < n; ++ga)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        g(ga, a, b) = 0.5 * (c(ga, b, a) + c(b, ga, a) + c(a, ga, b));
  return g;
}

Tensor4 christoffel_derivatives(const Tensor4& dc) {
  const int n = dc.extent(0);
  Tensor4 dg({n, n, n, n});
  for (int ga = 0; ga < n; ++ga)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d)
          dg(ga, a, b, d) = 0.5 * (dc(ga, b, a, d) + dc(b, ga, a, d) + dc(a, ga, b, d));
  return dg;
}

double frame_derivative(const FrameLayout& layout, const Eigen::VectorXd& grad_x,
                        const Eigen::VectorXd& grad_r, int direction) {
  if (layout.in_i1(direction)) return grad_x[direction];
  if (layout.in_i2(direction)) return grad_r[direction - layout.m];
  return 0.0;  // theta-independent
}

double a2_prefactor(int n) {
  return std::pow(4.0 * std::numbers::pi, -0.5 * n) / 360.0;
}

void riemann(FrameCurvature& fc) {
  const int n = fc.gamma.extent(0);
  fc.riem = Tensor4({n, n, n, n});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) {
          double v = fc.dgamma(a, b, d, g) - fc.dgamma(a, b, g, d);
          for (int mu = 0; mu < n; ++mu)
            v += fc.gamma(a, mu, g) * fc.gamma(mu, b, d) - fc.gamma(a, mu, d) * fc.gamma(mu, b, g) -
                 fc.c(mu, g, d) * fc.gamma(a, b, mu);
          fc.riem(a, b, g, d) = v;
        }
  fc.ric = Eigen::MatrixXd::Zero(n, n);
  fc.riem_norm_sq = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g) {
        fc.ric(a, b) += fc.riem(a, g, b, g);
        for (int d = 0; d < n; ++d) fc.riem_norm_sq += fc.riem(a, b, g, d) * fc.riem(a, b, g, d);
      }
  fc.tau = fc.ric.trace();
  fc.ric_norm_sq = fc.ric.squaredNorm();
  fc.a2_integrand = a2_prefactor(n) *
                    (5.0 * fc.tau * fc.tau - 2.0 * fc.ric_norm_sq + 2.0 * fc.riem_norm_sq);
}

FrameCurvature frame_curvature(const Bracket& b, const CutoffProfile& profile,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
  const ACoeffs ac = a_coeffs(b, profile, x, r);
  FrameCurvature fc;
  fc.c = structure_constants(ac, r, frame_r_min(profile));
  fc.gamma = christoffels(fc.c);
  fc.dgamma = christoffel_derivatives(structure_constant_derivatives(ac, r));
  riemann(fc);
  return fc;
}

double a2_integrand(const Bracket& b, const CutoffProfile& profile, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& r) {
  FrameEngine engine(b, profile);
  return engine.integrand(x, r);
}

FrameEngine::FrameEngine(const Bracket& b, const CutoffProfile& profile)
    : bracket_(b), profile_(profile), layout_{b.m(), b.k()}, r_min_(frame_r_min(profile)) {
  const int n = layout_.n();
  conn_.assign(n, Eigen::MatrixXd::Zero(n, n));
  dconn_.assign(static_cast<std::size_t>(n) * n, Eigen::MatrixXd::Zero(n, n));
  block_.setZero(n, n);
  ric_.setZero(n, n);
}

void FrameEngine::load(const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
  const int n = layout_.n();
  const int nd = layout_.m + layout_.k;  // I3 derivatives vanish
  fill_a_coeffs(bracket_, profile_, x, r, ac_);
  fill_structure_constants(ac_, r, c_);
  fill_structure_constant_derivatives(ac_, r, dc_);
  for (int g = 0; g < n; ++g) {
    Eigen::MatrixXd& cg = conn_[g];
    for (int a = 0; a < n; ++a)
      for (int mu = 0; mu < n; ++mu)
        cg(a, mu) = 0.5 * (c_(a, g, mu) + c_(g, a, mu) + c_(mu, a, g));
  }
  for (int d = 0; d < n; ++d)
    for (int g = 0; g < nd; ++g) {
      Eigen::MatrixXd& dm = dconn_[static_cast<std::size_t>(d) * n + g];
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          dm(a, b) = 0.5 * (dc_(a, d, b, g) + dc_(d, a, b, g) + dc_(b, a, d, g));
    }
}

double FrameEngine::integrand(const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
  if (!profile_.in_support(x.squaredNorm(), r.squaredNorm())) return 0.0;
  check_radii(r, r_min_);
  load(x, r);
  const int n = layout_.n();
  ric_.setZero();
  double riem_sq = 0.0;
  for (int g = 0; g < n; ++g)
    for (int d = g + 1; d < n; ++d) {
      // R(., ., g, d) = [A_g, A_d] - c(mu, g, d) A_mu + E_g Gamma(., ., d) - E_d Gamma(., ., g)
      block_.noalias() = conn_[g] * conn_[d];
      block_.noalias() -= conn_[d] * conn_[g];
      for (int mu = 0; mu < n; ++mu) {
        const double cm = c_(mu, g, d);
        if (cm != 0.0) block_ -= cm * conn_[mu];
      }
      block_ += dconn_[static_cast<std::size_t>(d) * n + g];
      block_ -= dconn_[static_cast<std::size_t>(g) * n + d];
      riem_sq += 2.0 * block_.squaredNorm();
      ric_.col(g) += block_.col(d);
      ric_.col(d) -= block_.col(g);
    }
  const double tau = ric_.trace();
  return a2_prefactor(n) * (5.0 * tau * tau - 2.0 * ric_.squaredNorm() + 2.0 * riem_sq);
}

DegreeEstimate degree_probe(const ScaledFamily& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& r, const Eigen::VectorXd& theta,
                            const std::vector<double>& s_list) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (double s : s_list) {
    if (s == 1.0) continue;
    const double fs = f(s, x, r, theta);
    const double f1 = f(1.0, x, s * r, theta);
    if (fs == 0.0 || f1 == 0.0 || !std::isfinite(fs) || !std::isfinite(f1)) continue;
    xs.push_back(std::log(s));
    ys.push_back(std::log(std::abs(fs)) - std::log(std::abs(f1)));
  }
  if (xs.empty()) throw AllZeroSamples("degree_probe: no s with nonzero f^s and f^1");
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  DegreeEstimate est;
  est.degree = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - est.degree * xs[i];
    ss += e * e;
  }
  est.residual = std::sqrt(ss / static_cast<double>(xs.size()));
  est.n_used = static_cast<int>(xs.size());
  return est;
}

HomogeneousSplit homogeneous_parts(const ScaledFamily& f, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& r, const Eigen::VectorXd& theta,
                                   const std::vector<int>& degrees,
                                   const std::vector<double>& s_list) {
  const auto rows = static_cast<Eigen::Index>(s_list.size());
  const auto cols = static_cast<Eigen::Index>(degrees.size());
  if (rows < cols) throw FitIllConditioned("homogeneous_parts: fewer samples than degrees");
  Eigen::MatrixXd basis(rows, cols);
  Eigen::VectorXd g(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double s = s_list[i];
    g[i] = f(s, x, r / s, theta);
    for (Eigen::Index j = 0; j < cols; ++j) basis(i, j) = std::pow(s, degrees[j]);
  }
  const Eigen::VectorXd col_scale = basis.colwise().norm().transpose();
  const Eigen::MatrixXd scaled = basis * col_scale.cwiseInverse().asDiagonal();
  const Eigen::VectorXd sol = scaled.colPivHouseholderQr().solve(g);
  HomogeneousSplit out;
  out.degrees = degrees;
  for (Eigen::Index j = 0; j < cols; ++j) out.parts.push_back(sol[j] / col_scale[j]);
  const double gn = g.norm();
  out.residual = gn > 0.0 ? (scaled * sol - g).norm() / gn : 0.0;
  return out;
}

}  // namespace isophasal
