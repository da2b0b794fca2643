#include "isophasal/intertwine.hpp"

#include "isophasal/errors.hpp"
#include "isophasal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

namespace isophasal {

namespace {

// Jet of w -> f(D_sigma w) from the jet of f at D_sigma w; D is block diagonal.
void torus_pullback(Jet& j, int m, const std::vector<double>& c, const std::vector<double>& s) {
  for (std::size_t p = 0; p < c.size(); ++p) {
    const int a = m + 2 * static_cast<int>(p);
    const Complex ga = j.grad[a];
    const Complex gb = j.grad[a + 1];
    j.grad[a] = c[p] * ga + s[p] * gb;
    j.grad[a + 1] = -s[p] * ga + c[p] * gb;
    const Eigen::VectorXcd ha = j.hess.col(a);
    const Eigen::VectorXcd hb = j.hess.col(a + 1);
    j.hess.col(a) = c[p] * ha + s[p] * hb;
    j.hess.col(a + 1) = -s[p] * ha + c[p] * hb;
    const Eigen::RowVectorXcd ra = j.hess.row(a);
    const Eigen::RowVectorXcd rb = j.hess.row(a + 1);
    j.hess.row(a) = c[p] * ra + s[p] * rb;
    j.hess.row(a + 1) = -s[p] * ra + c[p] * rb;
  }
}

Eigen::VectorXd rotate_planes(const Eigen::VectorXd& v, int m, const std::vector<double>& c,
                              const std::vector<double>& s) {
  Eigen::VectorXd out = v;
  for (std::size_t p = 0; p < c.size(); ++p) {
    const int a = m + 2 * static_cast<int>(p);
    out[a] = c[p] * v[a] - s[p] * v[a + 1];
    out[a + 1] = s[p] * v[a] + c[p] * v[a + 1];
  }
  return out;
}

void trig(const Eigen::VectorXd& sigma, std::vector<double>& c, std::vector<double>& s) {
  c.resize(sigma.size());
  s.resize(sigma.size());
  for (Eigen::Index p = 0; p < sigma.size(); ++p) {
    c[p] = std::cos(sigma[p]);
    s[p] = std::sin(sigma[p]);
  }
}

std::vector<Eigen::VectorXd> angle_grid(int k, int grid) {
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXi idx = Eigen::VectorXi::Zero(k);
  while (true) {
    out.push_back(idx.cast<double>() * (2.0 * std::numbers::pi / grid));
    int p = k - 1;
    while (p >= 0 && ++idx[p] == grid) idx[p--] = 0;
    if (p < 0) break;
  }
  return out;
}

}  // namespace

std::vector<Eigen::VectorXi> band_modes(int k, int n_band) {
  std::vector<Eigen::VectorXi> out;
  Eigen::VectorXi z = Eigen::VectorXi::Constant(k, -n_band);
  while (true) {
    out.push_back(z);
    int p = k - 1;
    while (p >= 0 && ++z[p] > n_band) z[p--] = -n_band;
    if (p < 0) break;
  }
  return out;
}

Eigen::MatrixXd torus_rotation(int m, const Eigen::VectorXd& sigma) {
  const int n = m + 2 * static_cast<int>(sigma.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index p = 0; p < sigma.size(); ++p) {
    const int a = m + 2 * static_cast<int>(p);
    d(a, a) = std::cos(sigma[p]);
    d(a, a + 1) = -std::sin(sigma[p]);
    d(a + 1, a) = std::sin(sigma[p]);
    d(a + 1, a + 1) = std::cos(sigma[p]);
  }
  return d;
}

Complex FourierField::coefficient(const Eigen::VectorXi& z) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i] == z) return coeffs[i];
  return {0.0, 0.0};
}

Complex FourierField::reconstruct(const Eigen::VectorXd& theta) const {
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < modes.size(); ++i)
    sum += coeffs[i] * std::polar(1.0, modes[i].cast<double>().dot(theta));
  return sum;
}

FourierField fourier_decompose(const ScalarField& f, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& r, int n_band, int grid) {
  if (grid < 2 * n_band + 1) throw std::invalid_argument("Fourier grid must have at least 2N+1 points");
  const int k = static_cast<int>(r.size());
  FourierField out;
  out.band = n_band;
  out.grid = grid;
  out.modes = band_modes(k, n_band);
  out.coeffs.assign(out.modes.size(), Complex{0.0, 0.0});
  const auto angles = angle_grid(k, grid);
  const double norm = 1.0 / std::pow(static_cast<double>(grid), k);
  for (const auto& sigma : angles) {
    const Complex v = f(Point::from_polar(x, r, sigma).coords());
    for (std::size_t i = 0; i < out.modes.size(); ++i)
      out.coeffs[i] += norm * v * std::polar(1.0, -out.modes[i].cast<double>().dot(sigma));
  }
  return out;
}

IntertwiningOperator::IntertwiningOperator(int m, int k, int n_band)
    : m_(m), k_(k), band_(n_band), grid_(2 * n_band + 1) {
  if (n_band < 0) throw std::invalid_argument("band limit must be nonnegative");
  modes_ = band_modes(k, n_band);
  rotations_.assign(modes_.size(), Eigen::MatrixXd::Identity(m, m));
  angles_ = angle_grid(k, grid_);
  const double norm = 1.0 / std::pow(static_cast<double>(grid_), k);
  phases_.resize(modes_.size());
  for (std::size_t i = 0; i < modes_.size(); ++i)
    for (const auto& sigma : angles_)
      phases_[i].push_back(norm * std::polar(1.0, -modes_[i].cast<double>().dot(sigma)));
}

void IntertwiningOperator::finish_groups() {
  // modes_ is lexicographic and symmetric, so -Z sits at the mirrored index.
  const std::size_t n = modes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    if (i < j)
      groups_.push_back({i, j});
    else if (i == j)
      groups_.push_back({i});
  }
}

IntertwiningOperator IntertwiningOperator::between(const Bracket& b1, const Bracket& b2, int n_band,
                                                   double tol) {
  if (b1.m() != b2.m() || b1.k() != b2.k()) throw DimensionMismatch("brackets differ in shape");
  IntertwiningOperator q(b1.m(), b1.k(), n_band);
  const std::size_t n = q.modes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    if (q.modes_[i].isZero() || j < i) continue;
    const ConjugatorReport rep = conjugator(b2, b1, q.modes_[i].cast<double>(), tol);
    q.rotations_[i] = rep.a;
    q.rotations_[j] = rep.a;  // j(-Z) = -j(Z)
    q.max_conj_residual_ = std::max(q.max_conj_residual_, rep.residual_conj);
  }
  q.finish_groups();
  return q;
}

IntertwiningOperator IntertwiningOperator::aligned_unchecked(const Bracket& b1, const Bracket& b2,
                                                             int n_band) {
  if (b1.m() != b2.m() || b1.k() != b2.k()) throw DimensionMismatch("brackets differ in shape");
  IntertwiningOperator q(b1.m(), b1.k(), n_band);
  const std::size_t n = q.modes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    if (q.modes_[i].isZero() || j < i) continue;
    const ConjugatorReport rep = aligning_rotation(b2, b1, q.modes_[i].cast<double>());
    q.rotations_[i] = rep.a;
    q.rotations_[j] = rep.a;
    q.max_conj_residual_ = std::max(q.max_conj_residual_, rep.residual_conj);
  }
  q.finish_groups();
  return q;
}

IntertwiningOperator IntertwiningOperator::identity(int m, int k, int n_band) {
  IntertwiningOperator q(m, k, n_band);
  q.finish_groups();
  return q;
}

Eigen::VectorXd IntertwiningOperator::moved(std::size_t group, const Eigen::VectorXd& v) const {
  Eigen::VectorXd y = v;
  y.head(m_) = rotations_[groups_[group].front()] * v.head(m_);
  return y;
}

std::vector<Jet> IntertwiningOperator::mode_jets(const JetField& f,
                                                 const std::vector<std::size_t>& mode_indices,
                                                 const Eigen::VectorXd& y) const {
  const int n = m_ + 2 * k_;
  std::vector<Jet> out(mode_indices.size(), Jet::zero(n));
  std::vector<double> c;
  std::vector<double> s;
  for (std::size_t j = 0; j < angles_.size(); ++j) {
    trig(angles_[j], c, s);
    Jet jet = f(rotate_planes(y, m_, c, s));
    torus_pullback(jet, m_, c, s);
    for (std::size_t t = 0; t < mode_indices.size(); ++t) {
      const Complex ph = phases_[mode_indices[t]][j];
      out[t].value += ph * jet.value;
      out[t].grad += ph * jet.grad;
      out[t].hess += ph * jet.hess;
    }
  }
  return out;
}

std::vector<Complex> IntertwiningOperator::mode_values(const ScalarField& f,
                                                       const std::vector<std::size_t>& mode_indices,
                                                       const Eigen::VectorXd& y) const {
  std::vector<Complex> out(mode_indices.size(), Complex{0.0, 0.0});
  std::vector<double> c;
  std::vector<double> s;
  for (std::size_t j = 0; j < angles_.size(); ++j) {
    trig(angles_[j], c, s);
    const Complex v = f(rotate_planes(y, m_, c, s));
    for (std::size_t t = 0; t < mode_indices.size(); ++t) out[t] += phases_[mode_indices[t]][j] * v;
  }
  return out;
}

std::vector<std::vector<Jet>> IntertwiningOperator::project_u_factors(const TestFunction& f,
                                                                      const Eigen::VectorXd& u) const {
  const int nu = 2 * k_;
  std::vector<std::vector<Jet>> out(f.n_terms(), std::vector<Jet>(modes_.size(), Jet::zero(nu)));
  std::vector<double> c;
  std::vector<double> s;
  for (std::size_t j = 0; j < angles_.size(); ++j) {
    trig(angles_[j], c, s);
    const Eigen::VectorXd ur = rotate_planes(u, 0, c, s);
    for (int t = 0; t < f.n_terms(); ++t) {
      Jet b = f.u_factor(t, ur);
      torus_pullback(b, 0, c, s);
      for (std::size_t i = 0; i < modes_.size(); ++i) {
        const Complex ph = phases_[i][j];
        Jet& acc = out[t][i];
        acc.value += ph * b.value;
        acc.grad += ph * b.grad;
        acc.hess += ph * b.hess;
      }
    }
  }
  return out;
}

Complex IntertwiningOperator::apply(const ScalarField& f, const Eigen::VectorXd& v) const {
  Complex sum{0.0, 0.0};
  for (std::size_t g = 0; g < groups_.size(); ++g)
    for (const Complex& c : mode_values(f, groups_[g], moved(g, v))) sum += c;
  return sum;
}

Jet IntertwiningOperator::apply_jet(const JetField& f, const Eigen::VectorXd& v) const {
  const int n = m_ + 2 * k_;
  Jet sum = Jet::zero(n);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
    t.topLeftCorner(m_, m_) = rotations_[groups_[g].front()];
    for (const Jet& j : mode_jets(f, groups_[g], moved(g, v))) sum += j.pulled_back(t);
  }
  return sum;
}

ScalarField apply_Q(const Bracket& b1, const Bracket& b2, const ScalarField& f, int n_band) {
  auto q = std::make_shared<IntertwiningOperator>(IntertwiningOperator::between(b1, b2, n_band));
  return [q, f](const Eigen::VectorXd& v) { return q->apply(f, v); };
}

MetricField bracket_inverse_metric_field(const Bracket& b, const CutoffProfile& profile) {
  return [b, profile](const Eigen::VectorXd& v) {
    return inverse_metric_at(b, profile, Point::from_coords(v, b.m()));
  };
}

LaplacianData laplacian_data(const MetricField& inverse_field, const Eigen::VectorXd& v,
                             const FDScheme& scheme) {
  LaplacianData d;
  d.ginv = inverse_field(v);
  const auto grads = metric_gradient(inverse_field, v, scheme);
  d.div = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index mu = 0; mu < v.size(); ++mu) d.div += grads[mu].row(mu).transpose();
  return d;
}

Complex apply_laplacian(const LaplacianData& data, const Jet& jet) {
  Complex out{0.0, 0.0};
  for (Eigen::Index mu = 0; mu < data.ginv.rows(); ++mu) {
    out -= data.div[mu] * jet.grad[mu];
    for (Eigen::Index nu = 0; nu < data.ginv.cols(); ++nu) out -= data.ginv(mu, nu) * jet.hess(mu, nu);
  }
  return out;
}

Complex laplacian(const Bracket& b, const CutoffProfile& profile, const JetField& f, const Point& p,
                  const FDScheme& scheme) {
  const Eigen::VectorXd v = p.coords();
  return apply_laplacian(laplacian_data(bracket_inverse_metric_field(b, profile), v, scheme), f(v));
}

FDScheme laplacian_scheme(const CutoffProfile& profile) {
  FDScheme s = FDScheme::defaults(profile);
  s.richardson = false;
  return s;
}

std::vector<Eigen::VectorXd> interior_points(int m, int k, const CutoffProfile& profile, int n,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double rx = profile.x_radius();
  const double ru = profile.u_radius();
  std::vector<Eigen::VectorXd> out;
  while (static_cast<int>(out.size()) < n) {
    Eigen::VectorXd v(m + 2 * k);
    for (int i = 0; i < m; ++i) v[i] = rx * unit(rng);
    for (int i = 0; i < 2 * k; ++i) v[m + i] = ru * unit(rng);
    if (v.head(m).squaredNorm() < 0.8 * rx * rx && v.tail(2 * k).squaredNorm() < 0.8 * ru * ru)
      out.push_back(v);
  }
  return out;
}

Bracket block_scaled(const Bracket& b, double factor) {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(b.m());
  d.tail(b.m() - b.m() / 2).setConstant(factor);
  std::vector<Eigen::MatrixXd> comps;
  for (int p = 0; p < b.k(); ++p) comps.push_back(d.asDiagonal() * b.component(p) * d.asDiagonal());
  return Bracket(comps);
}

IntertwineReport intertwine_residual(const IntertwiningOperator& q, const Bracket& b1,
                                     const Bracket& b2, const CutoffProfile& profile,
                                     const std::vector<TestFunction>& tests,
                                     const std::vector<Eigen::VectorXd>& points,
                                     const FDScheme& scheme) {
  const int m = b1.m();
  const int k = b1.k();
  const int n = m + 2 * k;
  if (b2.m() != m || b2.k() != k || q.m() != m || q.k() != k)
    throw DimensionMismatch("intertwining operator and brackets differ in shape");
  for (const auto& t : tests)
    if (t.band() > q.band()) throw std::invalid_argument("test function exceeds the band limit");
  const MetricField inv1 = bracket_inverse_metric_field(b1, profile);
  const MetricField inv2 = bracket_inverse_metric_field(b2, profile);
  const auto& groups = q.groups();

  // Off-grid angles for the reconstruction tail.
  Eigen::VectorXd delta(k);
  for (int p = 0; p < k; ++p) delta[p] = 0.37 + 0.84 * p;
  std::vector<double> dc;
  std::vector<double> ds;
  trig(delta, dc, ds);

  std::vector<double> residual(points.size(), 0.0);
  std::vector<double> tail(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t pi = begin; pi < end; ++pi) {
      const Eigen::VectorXd& v = points[pi];
      const LaplacianData data1 = laplacian_data(inv1, v, scheme);
      const LaplacianData data2_here = laplacian_data(inv2, v, scheme);
      std::vector<Eigen::VectorXd> ys;
      std::vector<LaplacianData> data2;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        Eigen::VectorXd y = v;
        y.head(m) = q.rotation(groups[g].front()) * v.head(m);
        data2.push_back(laplacian_data(inv2, y, scheme));
        ys.push_back(std::move(y));
      }
      const Eigen::VectorXd x = v.head(m);
      for (const auto& test : tests) {
        const auto proj = q.project_u_factors(test, v.tail(2 * k));
        const int nt = test.n_terms();
        Jet lhs_jet = Jet::zero(n);
        Complex rhs{0.0, 0.0};
        for (std::size_t g = 0; g < groups.size(); ++g) {
          const Eigen::MatrixXd& a = q.rotation(groups[g].front());
          std::vector<Jet> ax;
          std::vector<Jet> ax_lift;  // jet of x -> x_factor(A x)
          for (int t = 0; t < nt; ++t) {
            ax.push_back(test.x_factor(t, ys[g].head(m)));
            ax_lift.push_back(ax.back().pulled_back(a));
          }
          for (std::size_t idx : groups[g]) {
            Jet rhs_jet = Jet::zero(n);
            for (int t = 0; t < nt; ++t) {
              rhs_jet += tensor_jet(ax[t], proj[t][idx]);
              lhs_jet += tensor_jet(ax_lift[t], proj[t][idx]);
            }
            rhs += apply_laplacian(data2[g], rhs_jet);
          }
        }
        const Complex lhs = apply_laplacian(data1, lhs_jet);
        residual[pi] = std::max(residual[pi], std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));

        // Delta_2 f rebuilt from its band coefficients at an off-grid angle.
        std::vector<Jet> ax_here;
        for (int t = 0; t < nt; ++t) ax_here.push_back(test.x_factor(t, x));
        Complex rebuilt{0.0, 0.0};
        for (std::size_t i = 0; i < q.modes().size(); ++i) {
          Jet mode_jet = Jet::zero(n);
          for (int t = 0; t < nt; ++t) mode_jet += tensor_jet(ax_here[t], proj[t][i]);
          rebuilt += apply_laplacian(data2_here, mode_jet) *
                     std::polar(1.0, q.modes()[i].cast<double>().dot(delta));
        }
        Jet direct_jet = test.jet(rotate_planes(v, m, dc, ds));
        torus_pullback(direct_jet, m, dc, ds);
        const Complex direct = apply_laplacian(data2_here, direct_jet);
        tail[pi] = std::max(tail[pi], std::abs(rebuilt - direct) / (1.0 + std::abs(direct)));
      }
    }
  });

  IntertwineReport rep;
  rep.band = q.band();
  rep.n_points = static_cast<int>(points.size());
  rep.n_functions = static_cast<int>(tests.size());
  rep.max_conjugation_residual = q.max_conjugation_residual();
  for (std::size_t i = 0; i < points.size(); ++i) {
    rep.max_residual = std::max(rep.max_residual, residual[i]);
    rep.truncation_tail = std::max(rep.truncation_tail, tail[i]);
  }
  return rep;
}

}  // namespace isophasal
