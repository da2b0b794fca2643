#include "isophasal/metric.hpp"

#include "isophasal/errors.hpp"

#include <cmath>
#include <random>

namespace isophasal {

Point Point::from_polar(const Eigen::VectorXd& x, const Eigen::VectorXd& r,
                        const Eigen::VectorXd& theta) {
  if (r.size() != theta.size()) throw DimensionMismatch("r and theta differ in length");
  Point p{x, Eigen::VectorXd(2 * r.size())};
  for (Eigen::Index q = 0; q < r.size(); ++q) {
    p.u[2 * q] = r[q] * std::cos(theta[q]);
    p.u[2 * q + 1] = r[q] * std::sin(theta[q]);
  }
  return p;
}

Point Point::from_coords(const Eigen::VectorXd& v, int m) {
  return Point{v.head(m), v.tail(v.size() - m)};
}

Eigen::VectorXd Point::r() const {
  Eigen::VectorXd r(u.size() / 2);
  for (Eigen::Index q = 0; q < r.size(); ++q) r[q] = std::hypot(u[2 * q], u[2 * q + 1]);
  return r;
}

Eigen::VectorXd Point::theta() const {
  Eigen::VectorXd t(u.size() / 2);
  for (Eigen::Index q = 0; q < t.size(); ++q) t[q] = std::atan2(u[2 * q + 1], u[2 * q]);
  return t;
}

Eigen::VectorXd Point::coords() const {
  Eigen::VectorXd v(x.size() + u.size());
  v << x, u;
  return v;
}

Eigen::VectorXd vertical_field(const Eigen::VectorXd& z, const Eigen::VectorXd& u) {
  if (u.size() != 2 * z.size()) throw DimensionMismatch("u must have length 2k");
  Eigen::VectorXd out(u.size());
  for (Eigen::Index p = 0; p < z.size(); ++p) {
    out[2 * p] = -z[p] * u[2 * p + 1];
    out[2 * p + 1] = z[p] * u[2 * p];
  }
  return out;
}

Eigen::MatrixXd linear_factor(const Bracket& b, const Eigen::VectorXd& x) {
  if (x.size() != b.m()) throw DimensionMismatch("x must have length m");
  Eigen::MatrixXd l(b.m(), b.k());
  for (int p = 0; p < b.k(); ++p) l.col(p) = b.component(p).transpose() * x;
  return l;
}

Eigen::MatrixXd fibre_map(const Bracket& b, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  if (u.size() != 2 * b.k()) throw DimensionMismatch("u must have length 2k");
  const Eigen::MatrixXd l = linear_factor(b, x);
  Eigen::MatrixXd kmat(2 * b.k(), b.m());
  for (int p = 0; p < b.k(); ++p)
    for (int i = 0; i < b.m(); ++i) {
      kmat(2 * p, i) = -l(i, p) * u[2 * p + 1];
      kmat(2 * p + 1, i) = l(i, p) * u[2 * p];
    }
  return kmat;
}

MetricMatrix metric_at(const Bracket& b, const CutoffProfile& profile, const Point& p) {
  const int m = b.m();
  const int n = m + 2 * b.k();
  MetricMatrix g = MetricMatrix::Identity(n, n);
  const double s = psi(profile, p.x, p.u).value;
  if (s == 0.0) return g;
  const Eigen::MatrixXd kmat = fibre_map(b, p.x, p.u);
  g.topLeftCorner(m, m) += s * s * kmat.transpose() * kmat;
  g.topRightCorner(m, n - m) = -s * kmat.transpose();
  g.bottomLeftCorner(n - m, m) = -s * kmat;
  return g;
}

Eigen::MatrixXd inverse_metric_at(const Bracket& b, const CutoffProfile& profile, const Point& p) {
  const int m = b.m();
  const int n = m + 2 * b.k();
  Eigen::MatrixXd gi = Eigen::MatrixXd::Identity(n, n);
  const double s = psi(profile, p.x, p.u).value;
  if (s == 0.0) return gi;
  const Eigen::MatrixXd kmat = fibre_map(b, p.x, p.u);
  gi.topRightCorner(m, n - m) = s * kmat.transpose();
  gi.bottomLeftCorner(n - m, m) = s * kmat;
  gi.bottomRightCorner(n - m, n - m) += s * s * kmat * kmat.transpose();
  return gi;
}

bool is_euclidean_outside(const Bracket& b, const CutoffProfile& profile, int n_samples,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double rx = 2.0 * profile.x_radius();
  const double ru = 2.0 * profile.u_radius();
  std::uniform_real_distribution<double> ux(-rx, rx);
  std::uniform_real_distribution<double> uu(-ru, ru);
  const int n = b.m() + 2 * b.k();
  const MetricMatrix id = MetricMatrix::Identity(n, n);
  int accepted = 0;
  while (accepted < n_samples) {
    Point p{Eigen::VectorXd(b.m()), Eigen::VectorXd(2 * b.k())};
    for (auto& v : p.x) v = ux(rng);
    for (auto& v : p.u) v = uu(rng);
    if (profile.in_support(p.x.squaredNorm(), p.u.squaredNorm())) continue;
    ++accepted;
    if ((metric_at(b, profile, p) - id).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

}  // namespace isophasal
