#pragma once

// Curvature of the bracket metric in the orthonormal polar frame
//   E = (x^_1..x^_m, r^_1..r^_k, th^_1..th^_k),
//   x^_i = e_i + sum_p a_ip d/dtheta_p,  r^_p = d/dr_p,  th^_p = (1/r_p) d/dtheta_p,
// with a_ip(x, r) = phi_s(|x|^2, |r|^2) <[x, e_i], Z_p>. Every quantity depends
// on (x, r) only; all derivatives are analytic.

#include "isophasal/bracket.hpp"
#include "isophasal/cutoff.hpp"
#include "isophasal/tensor.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace isophasal {

/// Index sets I1 (x^), I2 (r^), I3 (th^) as 0-based frame indices.
struct FrameLayout {
  int m = 0;
  int k = 0;
  int n() const { return m + 2 * k; }
  int x(int i) const { return i; }
  int r(int p) const { return m + p; }
  int theta(int p) const { return m + k + p; }
  bool in_i1(int a) const { return a < m; }
  bool in_i2(int a) const { return a >= m && a < m + k; }
  bool in_i3(int a) const { return a >= m + k; }
};

struct ACoeffs {
  int m = 0;
  int k = 0;
  Eigen::MatrixXd a;  // (i, p)
  Tensor3 da_dx;      // (i, p, j)    d a_ip / d x_j
  Tensor3 da_dr;      // (i, p, q)    d a_ip / d r_q
  Tensor4 d2a_xx;     // (i, p, j, l)
  Tensor4 d2a_xr;     // (i, p, j, q)
  Tensor4 d2a_rr;     // (i, p, q, t)
};

ACoeffs a_coeffs(const Bracket& b, const CutoffProfile& profile, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& r);

/// Frame evaluations are refused closer than this to an axis.
double frame_r_min(const CutoffProfile& profile);

/// c(g, a, b) with [E_a, E_b] = sum_g c(g, a, b) E_g. Includes the flat polar
/// terms [r^_q, th^_q] = -(1/r_q) th^_q. Throws DegeneratePoint if some r_p <= r_min.
Tensor3 structure_constants(const ACoeffs& ac, const Eigen::VectorXd& r, double r_min = 0.0);

/// dc(g, a, b, d) = E_d(c(g, a, b)): d/dx_d on I1, d/dr on I2, zero on I3.
Tensor4 structure_constant_derivatives(const ACoeffs& ac, const Eigen::VectorXd& r);

/// Gamma(g, a, b) with nabla_{E_b} E_a = sum_g Gamma(g, a, b) E_g (Koszul formula).
Tensor3 christoffels(const Tensor3& c);

/// E_d applied to every Christoffel symbol; same linear map as christoffels().
Tensor4 christoffel_derivatives(const Tensor4& dc);

/// E_d(q) for a theta-independent scalar q(x, r) given its x- and r-gradients.
double frame_derivative(const FrameLayout& layout, const Eigen::VectorXd& grad_x,
                        const Eigen::VectorXd& grad_r, int direction);

struct FrameCurvature {
  Tensor3 c;
  Tensor3 gamma;
  Tensor4 dgamma;  // (g, a, b, d)
  Tensor4 riem;    // R(a, b, g, d) = g(R(E_g, E_d) E_b, E_a)
  Eigen::MatrixXd ric;
  double tau = 0.0;
  double ric_norm_sq = 0.0;
  double riem_norm_sq = 0.0;
  double a2_integrand = 0.0;
};

/// Fills riem, ric, tau, norms and the a2 integrand from consistent c, Gamma, dGamma.
void riemann(FrameCurvature& fc);

/// (4 pi)^{-n/2} / 360.
double a2_prefactor(int n);

FrameCurvature frame_curvature(const Bracket& b, const CutoffProfile& profile,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& r);

/// (4 pi)^{-n/2}/360 (5 tau^2 - 2 |Ric|^2 + 2 |R|^2) at (x, r). Exactly 0 off the
/// support of phi_s.
double a2_integrand(const Bracket& b, const CutoffProfile& profile, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& r);

/// Allocation-free integrand evaluator for quadrature loops. Not thread-safe;
/// use one engine per worker.
class FrameEngine {
 public:
  FrameEngine(const Bracket& b, const CutoffProfile& profile);

  double integrand(const Eigen::VectorXd& x, const Eigen::VectorXd& r);

  const FrameLayout& layout() const { return layout_; }

 private:
  void load(const Eigen::VectorXd& x, const Eigen::VectorXd& r);

  Bracket bracket_;
  CutoffProfile profile_;
  FrameLayout layout_;
  double r_min_;
  ACoeffs ac_;
  Tensor3 c_;
  Tensor4 dc_;
  std::vector<Eigen::MatrixXd> conn_;     // conn_[g](a, m) = Gamma(a, m, g)
  std::vector<Eigen::MatrixXd> dconn_;    // dconn_[d * n + g](a, b) = E_g Gamma(a, b, d)
  Eigen::MatrixXd block_;
  Eigen::MatrixXd ric_;
};

// Homogeneous (r, s)-deformations: f^s(x, r, th) = s^d f^1(x, s r, th).
using ScaledFamily = std::function<double(double s, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& r, const Eigen::VectorXd& theta)>;

struct DegreeEstimate {
  double degree = 0.0;
  double residual = 0.0;  // RMS misfit of the log-log line through the origin
  int n_used = 0;
};

/// Fits log|f^s(x,r)| - log|f^1(x,sr)| against log s. Throws AllZeroSamples when
/// no s gives two nonzero values.
DegreeEstimate degree_probe(const ScaledFamily& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& r, const Eigen::VectorXd& theta,
                            const std::vector<double>& s_list);

struct HomogeneousSplit {
  std::vector<int> degrees;
  std::vector<double> parts;  // f_d^1(x, r) for each degree
  double residual = 0.0;      // relative misfit
};

/// Splits f into homogeneous terms of the given degrees at (x, r) by least
/// squares on g(s) = f^s(x, r/s) = sum_d s^d f_d^1(x, r).
HomogeneousSplit homogeneous_parts(const ScaledFamily& f, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& r, const Eigen::VectorXd& theta,
                                   const std::vector<int>& degrees,
                                   const std::vector<double>& s_list);

}  // namespace isophasal
