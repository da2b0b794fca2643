#pragma once

// Torus-Fourier decomposition and the operator
//   (Q f)(x, u) = sum_Z (P_Z f)(A_Z x, u),
//   (P_Z f)(x, u) = (2 pi)^{-k} int f(x, R_sigma u) exp(-i Z . sigma) dsigma,
// with A_Z^T j_2(Z) A_Z = j_1(Z), which carries functions on (R^n, g_2) to
// functions on (R^n, g_1) and satisfies Delta_1 Q = Q Delta_2.

#include "isophasal/bracket.hpp"
#include "isophasal/coord_oracle.hpp"
#include "isophasal/cutoff.hpp"
#include "isophasal/metric.hpp"
#include "isophasal/test_function.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace isophasal {

/// All integer Z with |Z_p| <= N, lexicographic.
std::vector<Eigen::VectorXi> band_modes(int k, int n_band);

/// diag(I_m, R_sigma_1, ..., R_sigma_k) with counterclockwise plane rotations.
Eigen::MatrixXd torus_rotation(int m, const Eigen::VectorXd& sigma);

struct FourierField {
  int band = 0;
  int grid = 0;
  std::vector<Eigen::VectorXi> modes;
  std::vector<Complex> coeffs;

  Complex coefficient(const Eigen::VectorXi& z) const;  // 0 outside the band
  Complex reconstruct(const Eigen::VectorXd& theta) const;
};

/// Coefficients at fixed (x, r) by the uniform trapezoid rule on grid^k angles.
/// Requires grid >= 2 N + 1.
FourierField fourier_decompose(const ScalarField& f, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& r, int n_band, int grid);

class IntertwiningOperator {
 public:
  /// A_Z from the canonical-form conjugator of (b2, b1) at Z; A_0 = I.
  /// Throws SpectraMismatch if some band frequency has no conjugator.
  static IntertwiningOperator between(const Bracket& b1, const Bracket& b2, int n_band,
                                      double tol = 1e-9);
  /// Same construction without the spectral check (negative controls).
  static IntertwiningOperator aligned_unchecked(const Bracket& b1, const Bracket& b2, int n_band);
  static IntertwiningOperator identity(int m, int k, int n_band);

  int m() const { return m_; }
  int k() const { return k_; }
  int band() const { return band_; }
  int grid() const { return grid_; }
  const std::vector<Eigen::VectorXi>& modes() const { return modes_; }
  const Eigen::MatrixXd& rotation(std::size_t mode_index) const { return rotations_[mode_index]; }
  /// max_Z ||A_Z^T j_2 A_Z - j_1||_F over the band.
  double max_conjugation_residual() const { return max_conj_residual_; }

  /// Jets of P_Z f at y for the given mode indices.
  std::vector<Jet> mode_jets(const JetField& f, const std::vector<std::size_t>& mode_indices,
                             const Eigen::VectorXd& y) const;
  std::vector<Complex> mode_values(const ScalarField& f, const std::vector<std::size_t>& mode_indices,
                                   const Eigen::VectorXd& y) const;

  /// P_Z of every term's u-factor at u, for all band modes: out[term][mode].
  /// The x-factors are untouched by the torus, so P_Z f at (y, u) is
  /// sum_t x_factor_t(y) * out[t][Z] for any y.
  std::vector<std::vector<Jet>> project_u_factors(const TestFunction& f,
                                                  const Eigen::VectorXd& u) const;

  Complex apply(const ScalarField& f, const Eigen::VectorXd& v) const;
  Jet apply_jet(const JetField& f, const Eigen::VectorXd& v) const;

  /// Mode indices grouped by shared A_Z (Z and -Z share a rotation).
  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }

 private:
  IntertwiningOperator(int m, int k, int n_band);
  void finish_groups();
  Eigen::VectorXd moved(std::size_t group, const Eigen::VectorXd& v) const;

  int m_;
  int k_;
  int band_;
  int grid_;
  std::vector<Eigen::VectorXi> modes_;
  std::vector<Eigen::MatrixXd> rotations_;
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<Eigen::VectorXd> angles_;             // grid points sigma_j
  std::vector<std::vector<Complex>> phases_;        // [mode][j] = exp(-i Z.sigma_j) / grid^k
  double max_conj_residual_ = 0.0;
};

ScalarField apply_Q(const Bracket& b1, const Bracket& b2, const ScalarField& f, int n_band);

/// What the positive Laplacian needs from the metric at a point:
/// Delta f = -G^{mu nu} d_mu d_nu f - (d_mu G^{mu nu}) d_nu f  (det G = 1).
struct LaplacianData {
  Eigen::MatrixXd ginv;
  Eigen::VectorXd div;  // div_nu = sum_mu d_mu G^{mu nu}
};

MetricField bracket_inverse_metric_field(const Bracket& b, const CutoffProfile& profile);
LaplacianData laplacian_data(const MetricField& inverse_field, const Eigen::VectorXd& v,
                             const FDScheme& scheme);
Complex apply_laplacian(const LaplacianData& data, const Jet& jet);

Complex laplacian(const Bracket& b, const CutoffProfile& profile, const JetField& f, const Point& p,
                  const FDScheme& scheme);

/// FD scheme used for the Laplacian: order 4, no extrapolation.
FDScheme laplacian_scheme(const CutoffProfile& profile);

/// Random Cartesian points with |x|^2 < 0.8 R1sq and |u|^2 < 0.8 (R2/s)^2.
std::vector<Eigen::VectorXd> interior_points(int m, int k, const CutoffProfile& profile, int n,
                                             std::uint64_t seed = 99);

/// Copy of b whose j-maps are scaled by `factor` on the second half of R^m.
/// Not isospectral to b for factor != 1 whenever that block carries spectrum.
Bracket block_scaled(const Bracket& b, double factor);

struct IntertwineReport {
  int band = 0;
  int n_points = 0;
  int n_functions = 0;
  double max_residual = 0.0;
  double truncation_tail = 0.0;
  double max_conjugation_residual = 0.0;
};

/// max over f, p of |Delta_1(Q f)(p) - Q(Delta_2 f)(p)| / (1 + |Q(Delta_2 f)(p)|).
IntertwineReport intertwine_residual(const IntertwiningOperator& q, const Bracket& b1,
                                     const Bracket& b2, const CutoffProfile& profile,
                                     const std::vector<TestFunction>& tests,
                                     const std::vector<Eigen::VectorXd>& points,
                                     const FDScheme& scheme);

}  // namespace isophasal
