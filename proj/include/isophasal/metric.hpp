#pragma once

// The torus-invariant metric on R^{m+2k} built from a bracket and a cutoff:
// horizontal lifts Y -> (Y, psi [x, Y]*_u) are declared isometric to Euclidean
// R^m and orthogonal to the Euclidean fibre R^{2k}.

#include "isophasal/bracket.hpp"
#include "isophasal/cutoff.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace isophasal {

struct Point {
  Eigen::VectorXd x;  // R^m
  Eigen::VectorXd u;  // R^{2k}, planes (u_{2p}, u_{2p+1})

  /// Requires all r_p > 0 only for the polar accessors to be meaningful.
  static Point from_polar(const Eigen::VectorXd& x, const Eigen::VectorXd& r,
                          const Eigen::VectorXd& theta);
  static Point from_coords(const Eigen::VectorXd& v, int m);

  Eigen::VectorXd r() const;
  Eigen::VectorXd theta() const;
  Eigen::VectorXd coords() const;
  int dim() const { return static_cast<int>(x.size() + u.size()); }
};

using MetricMatrix = Eigen::MatrixXd;

/// Z*_u: blockwise Z_p J u_p with J = [[0, -1], [1, 0]].
Eigen::VectorXd vertical_field(const Eigen::VectorXd& z, const Eigen::VectorXd& u);

/// L(i, p) = <[x, e_i], Z_p>.
Eigen::MatrixXd linear_factor(const Bracket& b, const Eigen::VectorXd& x);

/// The 2k x m matrix K with K e_i = [x, e_i]*_u.
Eigen::MatrixXd fibre_map(const Bracket& b, const Eigen::VectorXd& x, const Eigen::VectorXd& u);

/// [[I + psi^2 K^T K, -psi K^T], [-psi K, I]]; det = 1.
MetricMatrix metric_at(const Bracket& b, const CutoffProfile& profile, const Point& p);

/// Exact inverse [[I, psi K^T], [psi K, I + psi^2 K K^T]].
Eigen::MatrixXd inverse_metric_at(const Bracket& b, const CutoffProfile& profile, const Point& p);

/// Samples points outside the support of psi and checks G == I exactly.
bool is_euclidean_outside(const Bracket& b, const CutoffProfile& profile, int n_samples,
                          std::uint64_t seed = 7);

}  // namespace isophasal
