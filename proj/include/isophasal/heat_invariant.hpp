#pragma once

// a2 heat invariant of the bracket metric by quadrature over
// x in [-R1, R1]^m, r in (0, R2/s]^k, with the torus angles integrated out
// exactly: dvol = (2 pi)^k prod_p r_p dx dr (det G = 1).

#include "isophasal/bracket.hpp"
#include "isophasal/cutoff.hpp"
#include "isophasal/quadrature.hpp"

#include <cstdint>
#include <vector>

namespace isophasal {

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::QMC;
  std::size_t n_nodes = 100000;  // per replicate
  int n_replicates = 8;
  std::uint64_t seed = 1;
  bool preflight = true;  // theta-independence check with the coordinate oracle
};

struct QuadratureResult {
  double value = 0.0;
  double std_error = 0.0;  // across replicates; NaN with a single replicate
  std::size_t n_nodes = 0;   // per replicate
  std::size_t n_active = 0;  // nodes inside the support, summed over replicates
  std::size_t n_total = 0;
  std::uint64_t seed = 0;
  std::vector<double> replicate_values;
  double wall_time = 0.0;  // seconds; not part of any artifact
};

/// Fraction of the sampling box covered by the support of phi_s.
double expected_active_fraction(int m, int k);

struct PreflightReport {
  double max_relative_variation = 0.0;
  int n_base = 0;
  int n_rotations = 0;
};

/// Coordinate-oracle integrand at n_rotations random torus rotations of
/// n_base interior points, evaluated with u rescaled so both supports have
/// radius R1. Throws ThetaDependenceDetected above tol.
PreflightReport theta_preflight(const Bracket& b, const CutoffProfile& profile, int n_base = 8,
                                int n_rotations = 32, double tol = 1e-8, std::uint64_t seed = 11);

/// Throws DegenerateNodes for empty node sets or no replicates.
QuadratureResult integrate_a2(const Bracket& b, const CutoffProfile& profile,
                              const QuadratureSpec& spec);

struct SweepRow {
  double s = 0.0;
  QuadratureResult result;
};

struct SweepFit {
  std::vector<int> degrees;    // d; the basis is s^(d - 2k)
  std::vector<double> coeffs;  // c_d
  std::vector<double> coeff_errors;
  double residual = 0.0;  // weighted relative residual
  int leading_degree = 2;
  double leading = 0.0;
  double leading_error = 0.0;
};

/// Weighted least squares of a2 against s^(d - 2k). Throws FitIllConditioned.
SweepFit fit_sweep(const std::vector<SweepRow>& rows, int k,
                   const std::vector<int>& degrees = {2, 1, 0, -1, -2});

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepFit fit;
};

/// Needs >= 5 distinct s spanning at least a factor of 4 (FitIllConditioned).
SweepResult sweep_s(const Bracket& b, const CutoffProfile& profile, const std::vector<double>& s_list,
                    const QuadratureSpec& spec);

struct ConsistencyReport {
  QuadratureResult first;
  QuadratureResult second;
  double difference = 0.0;
  double combined_error = 0.0;
  bool consistent = false;  // |difference| <= 3 combined_error
};

/// Throws SpectraMismatch if the brackets are not isospectral.
ConsistencyReport isophasal_consistency(const Bracket& b1, const Bracket& b2,
                                        const CutoffProfile& profile, const QuadratureSpec& spec);

}  // namespace isophasal
