#pragma once

// Curvature in Cartesian coordinates from finite differences of the metric
// matrix. Slow but independent of the polar frame, so it also works on the axes
// r_p = 0 and serves as the reference for sign conventions.

#include "isophasal/bracket.hpp"
#include "isophasal/cutoff.hpp"
#include "isophasal/metric.hpp"
#include "isophasal/tensor.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace isophasal {

struct FDScheme {
  double h = 1e-3;
  bool richardson = true;
  int order = 4;  // 2 or 4

  /// h = 1e-3 * max(R1, R2 / s), order 4, Richardson on.
  static FDScheme defaults(const CutoffProfile& profile);
};

/// Metric matrix as a function of Cartesian coordinates.
using MetricField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

MetricField bracket_metric_field(const Bracket& b, const CutoffProfile& profile);

struct MetricJets {
  Eigen::MatrixXd g;
  Eigen::MatrixXd ginv;
  std::vector<Eigen::MatrixXd> dg;   // dg[mu] = d_mu G
  std::vector<Eigen::MatrixXd> ddg;  // ddg[mu * n + nu] = d_mu d_nu G
};

MetricJets metric_jets(const MetricField& field, const Eigen::VectorXd& v, const FDScheme& scheme);

/// First derivatives only (for operators that need d G^{-1}).
std::vector<Eigen::MatrixXd> metric_gradient(const MetricField& field, const Eigen::VectorXd& v,
                                             const FDScheme& scheme);

struct CoordCurvature {
  Tensor3 gamma;  // (l, mu, nu) = Gamma^l_{mu nu}
  Tensor4 riem;   // R_{rho sigma mu nu} = g(R(d_mu, d_nu) d_sigma, d_rho)
  Eigen::MatrixXd ric;
  double tau = 0.0;
  double ric_norm_sq = 0.0;
  double riem_norm_sq = 0.0;
  double a2_integrand = 0.0;
};

/// Throws IllConditioned if G is numerically singular.
CoordCurvature coord_curvature(const MetricField& field, const Eigen::VectorXd& v,
                               const FDScheme& scheme);

Tensor3 christoffel_fd(const Bracket& b, const CutoffProfile& profile, const Point& p,
                       const FDScheme& scheme);

struct ScalarInvariants {
  double tau = 0.0;
  double ric_norm_sq = 0.0;
  double riem_norm_sq = 0.0;
  double a2_integrand = 0.0;
};

ScalarInvariants scalar_invariants_fd(const Bracket& b, const CutoffProfile& profile,
                                      const Point& p, const FDScheme& scheme);

/// Columns are the orthonormal polar frame (x^, r^, th^) in Cartesian components.
Eigen::MatrixXd frame_vectors(const Bracket& b, const CutoffProfile& profile, const Point& p);

/// Frame Christoffels Gamma(g, a, b) = <nabla_{E_b} E_a, E_g> computed from the
/// coordinate connection and finite differences of the frame field.
Tensor3 transported_christoffels(const Bracket& b, const CutoffProfile& profile, const Point& p,
                                 const FDScheme& scheme);

struct OracleReport {
  bool passed = false;
  double max_error = 0.0;
  int n_points = 0;
};

/// Conformal metric on R^2: G = exp(2f) I, f = sign * t beta(t), t = |x|^2,
/// beta(t) = exp(1 - 1/(1 - t/rho)).
MetricField conformal_test_field(double sign = 1.0, double rho = 4.0);

/// Closed-form scalar curvature -2 exp(-2f) Laplacian(f) of conformal_test_field.
double conformal_test_scalar(const Eigen::Vector2d& x, double sign = 1.0, double rho = 4.0);

/// Compares coordinate tau with the closed form on a grid; throws
/// ConventionMismatch when the values agree only up to sign.
OracleReport validate_known(const FDScheme& scheme, double tol = 1e-5);

}  // namespace isophasal
