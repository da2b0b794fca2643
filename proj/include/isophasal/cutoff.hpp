#pragma once

#include <Eigen/Dense>

namespace isophasal {

/// b(t) = exp(1 - 1/(1 - t)) for t < 1, else 0, with its first two derivatives.
struct BumpJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

BumpJet bump(double t);

/// Value and partials of phi in its two scalar arguments (t1, t2) = (|x|^2, |u|^2).
struct CutoffJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d12 = 0.0;
  double d22 = 0.0;
};

/// phi_s(t1, t2) = amplitude * b(t1 / r1sq) * b(s^2 t2 / r2sq).
class CutoffProfile {
 public:
  enum class Kind { BumpProduct };

  /// Throws std::invalid_argument for non-finite or non-positive radii/scale or
  /// negative amplitude (amplitude 0 is the trivial profile).
  CutoffProfile(double r1sq, double r2sq, double amplitude, double s = 1.0);

  Kind kind() const { return Kind::BumpProduct; }
  double r1sq() const { return r1sq_; }
  double r2sq() const { return r2sq_; }
  double amplitude() const { return amplitude_; }
  double scale() const { return s_; }

  /// Support radius in |x| and in |u| (the latter already divided by s).
  double x_radius() const;
  double u_radius() const;

  CutoffProfile with_scale(double s) const { return {r1sq_, r2sq_, amplitude_, s}; }

  bool in_support(double t1, double t2) const {
    return t1 < r1sq_ && s_ * s_ * t2 < r2sq_ && amplitude_ != 0.0;
  }

  CutoffJet operator()(double t1, double t2) const;

 private:
  double r1sq_;
  double r2sq_;
  double amplitude_;
  double s_;
};

/// psi(x, u) = phi_s(|x|^2, |u|^2) together with its (t1, t2) partials.
CutoffJet psi(const CutoffProfile& profile, const Eigen::VectorXd& x, const Eigen::VectorXd& u);

}  // namespace isophasal
