#include "isophasal/cutoff.hpp"

#include <cmath>
#include <stdexcept>

namespace isophasal {

BumpJet bump(double t) {
  BumpJet out;
  if (t >= 1.0) return out;
  const double w = 1.0 / (1.0 - t);
  const double exponent = 1.0 - w;
  if (exponent < -700.0) return out;  // underflow; derivatives vanish faster than w^4 grows
  const double v = std::exp(exponent);
  out.value = v;
  out.d1 = -v * w * w;
  out.d2 = v * (w * w * w * w - 2.0 * w * w * w);
  return out;
}

CutoffProfile::CutoffProfile(double r1sq, double r2sq, double amplitude, double s)
    : r1sq_(r1sq), r2sq_(r2sq), amplitude_(amplitude), s_(s) {
  auto positive_finite = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive_finite(r1sq) || !positive_finite(r2sq))
    throw std::invalid_argument("cutoff support radii must be finite and positive");
  if (!std::isfinite(amplitude) || amplitude < 0.0)
    throw std::invalid_argument("cutoff amplitude must be finite and non-negative");
  if (!positive_finite(s)) throw std::invalid_argument("cutoff scale s must be finite and positive");
}

double CutoffProfile::x_radius() const { return std::sqrt(r1sq_); }
double CutoffProfile::u_radius() const { return std::sqrt(r2sq_) / s_; }

CutoffJet CutoffProfile::operator()(double t1, double t2) const {
  CutoffJet out;
  if (!in_support(t1, t2)) return out;
  const double c1 = 1.0 / r1sq_;
  const double c2 = s_ * s_ / r2sq_;
  const BumpJet b1 = bump(t1 * c1);
  const BumpJet b2 = bump(t2 * c2);
  const double a = amplitude_;
  out.value = a * b1.value * b2.value;
  out.d1 = a * c1 * b1.d1 * b2.value;
  out.d2 = a * c2 * b1.value * b2.d1;
  out.d11 = a * c1 * c1 * b1.d2 * b2.value;
  out.d12 = a * c1 * c2 * b1.d1 * b2.d1;
  out.d22 = a * c2 * c2 * b1.value * b2.d2;
  return out;
}

CutoffJet psi(const CutoffProfile& profile, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  return profile(x.squaredNorm(), u.squaredNorm());
}

}  // namespace isophasal
