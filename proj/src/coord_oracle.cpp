#include "isophasal/coord_oracle.hpp"

#include "isophasal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace isophasal {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Matrix first_diff(const MetricField& f, const Vector& v, int mu, double h, int order) {
  Vector e = Vector::Zero(v.size());
  e[mu] = h;
  if (order == 2) return (f(v + e) - f(v - e)) / (2.0 * h);
  return (-f(v + 2.0 * e) + 8.0 * f(v + e) - 8.0 * f(v - e) + f(v - 2.0 * e)) / (12.0 * h);
}

Matrix second_diff(const MetricField& f, const Vector& v, const Matrix& f0, int mu, int nu,
                   double h, int order) {
  Vector a = Vector::Zero(v.size());
  Vector b = Vector::Zero(v.size());
  a[mu] = h;
  b[nu] = h;
  if (mu == nu) {
    if (order == 2) return (f(v + a) - 2.0 * f0 + f(v - a)) / (h * h);
    return (-f(v + 2.0 * a) + 16.0 * f(v + a) - 30.0 * f0 + 16.0 * f(v - a) - f(v - 2.0 * a)) /
           (12.0 * h * h);
  }
  if (order == 2) return (f(v + a + b) - f(v + a - b) - f(v - a + b) + f(v - a - b)) / (4.0 * h * h);
  static constexpr int steps[4] = {-2, -1, 1, 2};
  static constexpr double weights[4] = {1.0, -8.0, 8.0, -1.0};
  Matrix acc = Matrix::Zero(f0.rows(), f0.cols());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      acc += (weights[i] * weights[j]) * f(v + steps[i] * a + steps[j] * b);
  return acc / (144.0 * h * h);
}

template <typename Diff>
Matrix extrapolate(const FDScheme& scheme, Diff&& diff) {
  const Matrix coarse = diff(scheme.h);
  if (!scheme.richardson) return coarse;
  const Matrix fine = diff(0.5 * scheme.h);
  const double w = std::pow(2.0, scheme.order);
  return (w * fine - coarse) / (w - 1.0);
}

void check_scheme(const FDScheme& scheme) {
  if (scheme.order != 2 && scheme.order != 4)
    throw std::invalid_argument("finite-difference order must be 2 or 4");
  if (!(scheme.h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
}

// P with P G P^T = I.
Matrix orthonormalizer(const Matrix& g) {
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw IllConditioned("metric is not positive definite");
  const Matrix l = llt.matrixL();
  const double diag_min = l.diagonal().minCoeff();
  const double diag_max = l.diagonal().maxCoeff();
  if (!(diag_min > 1e-8 * diag_max)) throw IllConditioned("metric is numerically singular");
  return l.triangularView<Eigen::Lower>().solve(Matrix::Identity(g.rows(), g.cols()));
}

// Contracts every index of a rank-4 tensor with P.
Tensor4 transform_all(const Tensor4& t, const Matrix& p) {
  const int n = t.extent(0);
  Tensor4 cur = t;
  for (int axis = 0; axis < 4; ++axis) {
    Tensor4 next({n, n, n, n});
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
          for (int i3 = 0; i3 < n; ++i3) {
            const int idx[4] = {i0, i1, i2, i3};
            int src[4] = {i0, i1, i2, i3};
            double acc = 0.0;
            for (int s = 0; s < n; ++s) {
              src[axis] = s;
              const double w = p(idx[axis], s);
              if (w != 0.0) acc += w * cur(src[0], src[1], src[2], src[3]);
            }
            next(i0, i1, i2, i3) = acc;
          }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

FDScheme FDScheme::defaults(const CutoffProfile& profile) {
  FDScheme s;
  s.h = 1e-3 * std::max(profile.x_radius(), profile.u_radius());
  return s;
}

MetricField bracket_metric_field(const Bracket& b, const CutoffProfile& profile) {
  return [b, profile](const Vector& v) { return metric_at(b, profile, Point::from_coords(v, b.m())); };
}

std::vector<Matrix> metric_gradient(const MetricField& field, const Vector& v,
                                    const FDScheme& scheme) {
  check_scheme(scheme);
  const int n = static_cast<int>(v.size());
  std::vector<Matrix> dg(n);
  for (int mu = 0; mu < n; ++mu)
    dg[mu] = extrapolate(scheme, [&](double h) { return first_diff(field, v, mu, h, scheme.order); });
  return dg;
}

MetricJets metric_jets(const MetricField& field, const Vector& v, const FDScheme& scheme) {
  check_scheme(scheme);
  const int n = static_cast<int>(v.size());
  MetricJets j;
  j.g = field(v);
  if (j.g.rows() != n || j.g.cols() != n) throw DimensionMismatch("metric field has wrong size");
  Eigen::LDLT<Matrix> ldlt(j.g);
  if (ldlt.info() != Eigen::Success) throw IllConditioned("metric factorization failed");
  j.ginv = ldlt.solve(Matrix::Identity(n, n));
  j.dg = metric_gradient(field, v, scheme);
  j.ddg.assign(static_cast<std::size_t>(n) * n, Matrix());
  for (int mu = 0; mu < n; ++mu)
    for (int nu = mu; nu < n; ++nu) {
      Matrix d = extrapolate(scheme, [&](double h) {
        return second_diff(field, v, j.g, mu, nu, h, scheme.order);
      });
      j.ddg[static_cast<std::size_t>(nu) * n + mu] = d;
      j.ddg[static_cast<std::size_t>(mu) * n + nu] = std::move(d);
    }
  return j;
}

CoordCurvature coord_curvature(const MetricField& field, const Vector& v, const FDScheme& scheme) {
  const MetricJets j = metric_jets(field, v, scheme);
  const int n = static_cast<int>(v.size());
  const Matrix p = orthonormalizer(j.g);

  Tensor3 g1({n, n, n});  // first kind, (s, mu, nu)
  for (int s = 0; s < n; ++s)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu)
        g1(s, mu, nu) = 0.5 * (j.dg[mu](s, nu) + j.dg[nu](s, mu) - j.dg[s](mu, nu));

  CoordCurvature out;
  out.gamma = Tensor3({n, n, n});
  for (int l = 0; l < n; ++l)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu) {
        double acc = 0.0;
        for (int s = 0; s < n; ++s) acc += j.ginv(l, s) * g1(s, mu, nu);
        out.gamma(l, mu, nu) = acc;
      }

  // dgamma(rho, l, mu, nu) = d_rho Gamma^l_{mu nu}
  Tensor4 dgamma({n, n, n, n});
  for (int rho = 0; rho < n; ++rho) {
    const Matrix dginv = -j.ginv * j.dg[rho] * j.ginv;
    Tensor3 dg1({n, n, n});
    for (int s = 0; s < n; ++s)
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu)
          dg1(s, mu, nu) = 0.5 * (j.ddg[rho * n + mu](s, nu) + j.ddg[rho * n + nu](s, mu) -
                                  j.ddg[rho * n + s](mu, nu));
    for (int l = 0; l < n; ++l)
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
          double acc = 0.0;
          for (int s = 0; s < n; ++s) acc += dginv(l, s) * g1(s, mu, nu) + j.ginv(l, s) * dg1(s, mu, nu);
          dgamma(rho, l, mu, nu) = acc;
        }
  }

  // R^r_{s mu nu} = d_mu Gamma^r_{nu s} - d_nu Gamma^r_{mu s}
  //               + Gamma^r_{mu l} Gamma^l_{nu s} - Gamma^r_{nu l} Gamma^l_{mu s}
  Tensor4 up({n, n, n, n});
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
          double acc = dgamma(mu, r, nu, s) - dgamma(nu, r, mu, s);
          for (int l = 0; l < n; ++l)
            acc += out.gamma(r, mu, l) * out.gamma(l, nu, s) - out.gamma(r, nu, l) * out.gamma(l, mu, s);
          up(r, s, mu, nu) = acc;
        }
  out.riem = Tensor4({n, n, n, n});
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
          double acc = 0.0;
          for (int a = 0; a < n; ++a) acc += j.g(r, a) * up(a, s, mu, nu);
          out.riem(r, s, mu, nu) = acc;
        }

  const Tensor4 ortho = transform_all(out.riem, p);
  out.ric = Matrix::Zero(n, n);  // in a G-orthonormal basis
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        out.ric(a, b) += ortho(a, c, b, c);
        for (int d = 0; d < n; ++d) out.riem_norm_sq += ortho(a, b, c, d) * ortho(a, b, c, d);
      }
  out.tau = out.ric.trace();
  out.ric_norm_sq = out.ric.squaredNorm();
  out.a2_integrand = std::pow(4.0 * std::numbers::pi, -0.5 * n) / 360.0 *
                     (5.0 * out.tau * out.tau - 2.0 * out.ric_norm_sq + 2.0 * out.riem_norm_sq);
  return out;
}

Tensor3 christoffel_fd(const Bracket& b, const CutoffProfile& profile, const Point& p,
                       const FDScheme& scheme) {
  const MetricField field = bracket_metric_field(b, profile);
  const Vector v = p.coords();
  const int n = static_cast<int>(v.size());
  const Matrix g = field(v);
  Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success) throw IllConditioned("metric factorization failed");
  const Matrix ginv = ldlt.solve(Matrix::Identity(n, n));
  const std::vector<Matrix> dg = metric_gradient(field, v, scheme);
  Tensor3 gamma({n, n, n});
  for (int l = 0; l < n; ++l)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu) {
        double acc = 0.0;
        for (int s = 0; s < n; ++s)
          acc += ginv(l, s) * 0.5 * (dg[mu](s, nu) + dg[nu](s, mu) - dg[s](mu, nu));
        gamma(l, mu, nu) = acc;
      }
  return gamma;
}

ScalarInvariants scalar_invariants_fd(const Bracket& b, const CutoffProfile& profile,
                                      const Point& p, const FDScheme& scheme) {
  const CoordCurvature cc = coord_curvature(bracket_metric_field(b, profile), p.coords(), scheme);
  return {cc.tau, cc.ric_norm_sq, cc.riem_norm_sq, cc.a2_integrand};
}

Matrix frame_vectors(const Bracket& b, const CutoffProfile& profile, const Point& p) {
  const int m = b.m();
  const int k = b.k();
  const int n = m + 2 * k;
  const Vector r = p.r();
  const double phi = psi(profile, p.x, p.u).value;
  const Matrix l = linear_factor(b, p.x);
  Matrix e = Matrix::Zero(n, n);
  for (int i = 0; i < m; ++i) {
    e(i, i) = 1.0;
    for (int q = 0; q < k; ++q) {
      // d/dtheta_q = J u_q
      const double a = phi * l(i, q);
      e(m + 2 * q, i) = -a * p.u[2 * q + 1];
      e(m + 2 * q + 1, i) = a * p.u[2 * q];
    }
  }
  for (int q = 0; q < k; ++q) {
    if (!(r[q] > 0.0)) throw DegeneratePoint("polar frame undefined on an axis");
    e(m + 2 * q, m + q) = p.u[2 * q] / r[q];
    e(m + 2 * q + 1, m + q) = p.u[2 * q + 1] / r[q];
    e(m + 2 * q, m + k + q) = -p.u[2 * q + 1] / r[q];
    e(m + 2 * q + 1, m + k + q) = p.u[2 * q] / r[q];
  }
  return e;
}

Tensor3 transported_christoffels(const Bracket& b, const CutoffProfile& profile, const Point& p,
                                 const FDScheme& scheme) {
  check_scheme(scheme);
  const int m = b.m();
  const Vector v = p.coords();
  const int n = static_cast<int>(v.size());
  const Tensor3 coord = christoffel_fd(b, profile, p, scheme);
  const Matrix g = metric_at(b, profile, p);
  const Matrix e = frame_vectors(b, profile, p);
  const MetricField frame_field = [&](const Vector& w) {
    return frame_vectors(b, profile, Point::from_coords(w, m));
  };
  Tensor3 out({n, n, n});
  for (int bb = 0; bb < n; ++bb) {
    // (D E) applied along E_b, all columns at once
    const Vector dir = e.col(bb);
    const Matrix de = extrapolate(scheme, [&](double h) {
      if (scheme.order == 2) return Matrix((frame_field(v + h * dir) - frame_field(v - h * dir)) / (2.0 * h));
      return Matrix((-frame_field(v + 2.0 * h * dir) + 8.0 * frame_field(v + h * dir) -
                     8.0 * frame_field(v - h * dir) + frame_field(v - 2.0 * h * dir)) /
                    (12.0 * h));
    });
    for (int a = 0; a < n; ++a) {
      Vector nabla = de.col(a);
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int mu = 0; mu < n; ++mu)
          for (int nu = 0; nu < n; ++nu) acc += coord(l, nu, mu) * e(mu, a) * e(nu, bb);
        nabla[l] += acc;
      }
      const Vector gn = g * nabla;
      for (int gg = 0; gg < n; ++gg) out(gg, a, bb) = gn.dot(e.col(gg));
    }
  }
  return out;
}

namespace {

struct ConformalJet {
  double f = 0.0;
  double lap = 0.0;
};

ConformalJet conformal_jet(double t, double sign, double rho) {
  const BumpJet bj = bump(t / rho);
  const double beta = bj.value;
  const double beta1 = bj.d1 / rho;
  const double beta2 = bj.d2 / (rho * rho);
  const double f1 = beta + t * beta1;
  const double f2 = 2.0 * beta1 + t * beta2;
  return {sign * t * beta, sign * (4.0 * f1 + 4.0 * t * f2)};
}

}  // namespace

MetricField conformal_test_field(double sign, double rho) {
  return [sign, rho](const Vector& v) {
    const ConformalJet cj = conformal_jet(v.squaredNorm(), sign, rho);
    return Matrix(std::exp(2.0 * cj.f) * Matrix::Identity(v.size(), v.size()));
  };
}

double conformal_test_scalar(const Eigen::Vector2d& x, double sign, double rho) {
  const ConformalJet cj = conformal_jet(x.squaredNorm(), sign, rho);
  return -2.0 * std::exp(-2.0 * cj.f) * cj.lap;
}

OracleReport validate_known(const FDScheme& scheme, double tol) {
  const MetricField field = conformal_test_field();
  OracleReport rep;
  double flipped = 0.0;
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j) {
      const Eigen::Vector2d x(0.5 * i, 0.5 * j);
      const double exact = conformal_test_scalar(x);
      const double tau = coord_curvature(field, x, scheme).tau;
      rep.max_error = std::max(rep.max_error, std::abs(tau - exact));
      flipped = std::max(flipped, std::abs(tau + exact));
      ++rep.n_points;
    }
  rep.passed = rep.max_error <= tol;
  if (!rep.passed && flipped <= tol)
    throw ConventionMismatch("coordinate scalar curvature has the opposite sign");
  return rep;
}

}  // namespace isophasal
