#pragma once

// Self-tests shared by the validate command and the test suite.

#include "isophasal/bracket.hpp"
#include "isophasal/coord_oracle.hpp"
#include "isophasal/cutoff.hpp"
#include "isophasal/tensor.hpp"

#include <cstdint>
#include <vector>

namespace isophasal {

struct PolarSample {
  Eigen::VectorXd x;
  Eigen::VectorXd r;
  Eigen::VectorXd theta;
};

/// Points strictly inside the support with every r_p in [0.1, 0.55] * (R2/s).
std::vector<PolarSample> interior_polar_samples(int m, int k, const CutoffProfile& profile, int n,
                                                std::uint64_t seed);

/// Largest violation of the pair antisymmetries, pair exchange and first
/// Bianchi identity, divided by max |R| (0 for R = 0).
double riemann_symmetry_residual(const Tensor4& riem);

struct FlatnessReport {
  double max_riem = 0.0;  // max |R(a, b, g, d)|
  int n_points = 0;
};

/// Zero bracket: the polar frame is non-holonomic but the metric is flat.
FlatnessReport flatness_check(const CutoffProfile& profile, int m, int k, int n_points,
                              std::uint64_t seed);

struct OracleComparison {
  double tau_error = 0.0;  // relative, max over points
  double ric_error = 0.0;
  double riem_error = 0.0;
  double symmetry_residual = 0.0;
  int n_points = 0;

  double max_error() const;
};

/// Frame engine vs coordinate oracle on the scalars tau, |Ric|^2, |R|^2.
OracleComparison compare_with_oracle(const Bracket& b, const CutoffProfile& profile, int n_points,
                                     std::uint64_t seed, const FDScheme& scheme);

/// R(E_a, E_b, E_g, E_d) from the coordinate oracle contracted with the
/// Cartesian components of the polar frame.
double oracle_frame_riemann(const Bracket& b, const CutoffProfile& profile, const PolarSample& s,
                            int a, int bb, int g, int d, const FDScheme& scheme);

struct MetricValidity {
  double max_det_error = 0.0;      // |det G - 1|
  double max_outside_error = 0.0;  // max |G - I| at points outside the support
  int n_points = 0;
  int n_outside = 0;
};

/// Uniform points in a box twice the support, so both regions are hit.
MetricValidity metric_validity(const Bracket& b, const CutoffProfile& profile, int n_points,
                               std::uint64_t seed);

}  // namespace isophasal
