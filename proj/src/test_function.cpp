#include "isophasal/test_function.hpp"

#include "isophasal/cutoff.hpp"
#include "isophasal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace isophasal {

namespace {

const Complex kI{0.0, 1.0};

Jet product(const Jet& a, const Jet& b) {
  Jet out;
  out.value = a.value * b.value;
  out.grad = a.value * b.grad + b.value * a.grad;
  out.hess = a.value * b.hess + b.value * a.hess + a.grad * b.grad.transpose() +
             b.grad * a.grad.transpose();
  return out;
}

struct Radial {
  double value;
  double d1;
  double d2;
};

Radial radial(RadialKind kind, double t, double width) {
  if (kind == RadialKind::Gaussian) {
    const double v = std::exp(-t / (2.0 * width));
    return {v, -v / (2.0 * width), v / (4.0 * width * width)};
  }
  const BumpJet b = bump(t / width);
  return {b.value, b.d1 / width, b.d2 / (width * width)};
}

// Jet of rho(|v_block|^2) embedded in n dimensions.
Jet radial_jet(RadialKind kind, const Eigen::VectorXd& v, int offset, int len, double width) {
  const int n = static_cast<int>(v.size());
  const auto blk = v.segment(offset, len);
  const Radial r = radial(kind, blk.squaredNorm(), width);
  Jet j = Jet::zero(n);
  j.value = r.value;
  j.grad.segment(offset, len) = (2.0 * r.d1 * blk).cast<Complex>();
  Eigen::MatrixXd h = 4.0 * r.d2 * blk * blk.transpose();
  h.diagonal().array() += 2.0 * r.d1;
  j.hess.block(offset, offset, len, len) = h.cast<Complex>();
  return j;
}

Complex ipow(Complex w, int e) {
  Complex out{1.0, 0.0};
  for (int i = 0; i < e; ++i) out *= w;
  return out;
}

}  // namespace

Jet Jet::zero(int n) {
  return {Complex{0.0, 0.0}, Eigen::VectorXcd::Zero(n), Eigen::MatrixXcd::Zero(n, n)};
}

Jet& Jet::operator+=(const Jet& other) {
  value += other.value;
  grad += other.grad;
  hess += other.hess;
  return *this;
}

Jet& Jet::operator*=(Complex c) {
  value *= c;
  grad *= c;
  hess *= c;
  return *this;
}

Jet Jet::pulled_back(const Eigen::MatrixXd& t) const {
  const Eigen::MatrixXcd tc = t.cast<Complex>();
  return {value, tc.transpose() * grad, tc.transpose() * hess * tc};
}

double Jet::max_abs() const {
  double out = std::abs(value);
  if (grad.size() > 0) out = std::max(out, grad.cwiseAbs().maxCoeff());
  if (hess.size() > 0) out = std::max(out, hess.cwiseAbs().maxCoeff());
  return out;
}

TestFunction::TestFunction(int m, int k, std::vector<ModeTerm> terms, RadialKind radial,
                           double x_width, double u_width)
    : m_(m), k_(k), terms_(std::move(terms)), radial_(radial), x_width_(x_width), u_width_(u_width) {
  for (auto& t : terms_) {
    if (t.mode.size() != k_) throw DimensionMismatch("test-function mode must have length k");
    if (t.poly.beta.size() == 0) t.poly.beta = Eigen::VectorXd::Zero(m_);
    if (t.poly.gamma.size() == 0) t.poly.gamma = Eigen::MatrixXd::Zero(m_, m_);
    if (t.poly.beta.size() != m_ || t.poly.gamma.rows() != m_ || t.poly.gamma.cols() != m_)
      throw DimensionMismatch("test-function polynomial has wrong size");
  }
}

int TestFunction::band() const {
  int b = 0;
  for (const auto& t : terms_) b = std::max(b, t.mode.cwiseAbs().maxCoeff());
  return b;
}

Complex TestFunction::operator()(const Eigen::VectorXd& v) const {
  const auto x = v.head(m_);
  const auto u = v.tail(2 * k_);
  const double common = radial(radial_, x.squaredNorm(), x_width_).value *
                        radial(radial_, u.squaredNorm(), u_width_).value;
  if (common == 0.0) return {0.0, 0.0};
  Complex sum{0.0, 0.0};
  for (const auto& t : terms_) {
    Complex w = t.coeff * (t.poly.alpha + t.poly.beta.dot(x) + x.dot(t.poly.gamma * x));
    for (int p = 0; p < k_; ++p) {
      const int z = t.mode[p];
      const double sg = z < 0 ? -1.0 : 1.0;
      w *= ipow(Complex{u[2 * p], sg * u[2 * p + 1]}, std::abs(z));
    }
    sum += w;
  }
  return common * sum;
}

Jet TestFunction::jet(const Eigen::VectorXd& v) const {
  const int n = m_ + 2 * k_;
  const Jet common = product(radial_jet(radial_, v, 0, m_, x_width_),
                             radial_jet(radial_, v, m_, 2 * k_, u_width_));
  if (common.value == 0.0 && common.grad.isZero(0.0) && common.hess.isZero(0.0)) return Jet::zero(n);
  const Eigen::VectorXd x = v.head(m_);
  Jet sum = Jet::zero(n);
  for (const auto& t : terms_) {
    Jet term = Jet::zero(n);
    term.value = t.poly.alpha + t.poly.beta.dot(x) + x.dot(t.poly.gamma * x);
    const Eigen::MatrixXd sym = t.poly.gamma + t.poly.gamma.transpose();
    term.grad.head(m_) = (t.poly.beta + sym * x).cast<Complex>();
    term.hess.topLeftCorner(m_, m_) = sym.cast<Complex>();
    for (int p = 0; p < k_; ++p) {
      const int e = std::abs(t.mode[p]);
      if (e == 0) continue;
      const Complex dir2 = t.mode[p] < 0 ? -kI : kI;
      const Complex w{v[m_ + 2 * p], (t.mode[p] < 0 ? -1.0 : 1.0) * v[m_ + 2 * p + 1]};
      Jet pj = Jet::zero(n);
      const int a = m_ + 2 * p;
      pj.value = ipow(w, e);
      const Complex g = static_cast<double>(e) * ipow(w, e - 1);
      pj.grad[a] = g;
      pj.grad[a + 1] = dir2 * g;
      if (e >= 2) {
        const Complex h = static_cast<double>(e * (e - 1)) * ipow(w, e - 2);
        pj.hess(a, a) = h;
        pj.hess(a, a + 1) = pj.hess(a + 1, a) = dir2 * h;
        pj.hess(a + 1, a + 1) = dir2 * dir2 * h;
      }
      term = product(term, pj);
    }
    term *= t.coeff;
    sum += term;
  }
  return product(common, sum);
}

Jet TestFunction::x_factor(int term, const Eigen::VectorXd& x) const {
  const ModeTerm& t = terms_[term];
  Jet poly = Jet::zero(m_);
  poly.value = t.poly.alpha + t.poly.beta.dot(x) + x.dot(t.poly.gamma * x);
  const Eigen::MatrixXd sym = t.poly.gamma + t.poly.gamma.transpose();
  poly.grad = (t.poly.beta + sym * x).cast<Complex>();
  poly.hess = sym.cast<Complex>();
  Jet out = product(poly, radial_jet(radial_, x, 0, m_, x_width_));
  out *= t.coeff;
  return out;
}

Jet TestFunction::u_factor(int term, const Eigen::VectorXd& u) const {
  const ModeTerm& t = terms_[term];
  const int n = 2 * k_;
  Jet out = radial_jet(radial_, u, 0, n, u_width_);
  for (int p = 0; p < k_; ++p) {
    const int e = std::abs(t.mode[p]);
    if (e == 0) continue;
    const Complex dir2 = t.mode[p] < 0 ? -kI : kI;
    const Complex w{u[2 * p], (t.mode[p] < 0 ? -1.0 : 1.0) * u[2 * p + 1]};
    Jet pj = Jet::zero(n);
    const int a = 2 * p;
    pj.value = ipow(w, e);
    const Complex g = static_cast<double>(e) * ipow(w, e - 1);
    pj.grad[a] = g;
    pj.grad[a + 1] = dir2 * g;
    if (e >= 2) {
      const Complex h = static_cast<double>(e * (e - 1)) * ipow(w, e - 2);
      pj.hess(a, a) = h;
      pj.hess(a, a + 1) = pj.hess(a + 1, a) = dir2 * h;
      pj.hess(a + 1, a + 1) = dir2 * dir2 * h;
    }
    out = product(out, pj);
  }
  return out;
}

Jet tensor_jet(const Jet& a, const Jet& b) {
  const auto m = a.grad.size();
  const auto l = b.grad.size();
  Jet out;
  out.value = a.value * b.value;
  out.grad.resize(m + l);
  out.grad.head(m) = a.grad * b.value;
  out.grad.tail(l) = a.value * b.grad;
  out.hess.resize(m + l, m + l);
  out.hess.topLeftCorner(m, m) = a.hess * b.value;
  out.hess.topRightCorner(m, l) = a.grad * b.grad.transpose();
  out.hess.bottomLeftCorner(l, m) = b.grad * a.grad.transpose();
  out.hess.bottomRightCorner(l, l) = a.value * b.hess;
  return out;
}

ScalarField TestFunction::as_field() const {
  return [f = *this](const Eigen::VectorXd& v) { return f(v); };
}

JetField TestFunction::as_jet_field() const {
  return [f = *this](const Eigen::VectorXd& v) { return f.jet(v); };
}

std::vector<TestFunction> standard_test_set(int m, int k, std::uint64_t seed) {
  static const std::vector<std::vector<std::vector<int>>> patterns = {
      {{0, 0, 0}},
      {{1, 0, 0}},
      {{0, -1, 0}},
      {{1, 1, 0}},
      {{2, 0, -1}},
      {{-1, 2, 1}},
      {{1, 0, 0}, {0, 0, 2}},
      {{2, 2, 2}, {-1, 0, 1}, {0, 0, 0}},
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<TestFunction> out;
  for (const auto& pattern : patterns) {
    std::vector<ModeTerm> terms;
    for (const auto& z : pattern) {
      ModeTerm t;
      t.mode = Eigen::VectorXi::Zero(k);
      for (int p = 0; p < std::min<int>(k, 3); ++p) t.mode[p] = z[p];
      t.coeff = Complex{normal(rng), normal(rng)};
      t.poly.alpha = 1.0 + 0.25 * normal(rng);
      t.poly.beta = Eigen::VectorXd(m);
      for (auto& b : t.poly.beta) b = 0.5 * normal(rng);
      Eigen::MatrixXd g(m, m);
      for (auto& c : g.reshaped()) c = 0.3 * normal(rng);
      t.poly.gamma = 0.5 * (g + g.transpose());
      terms.push_back(std::move(t));
    }
    out.emplace_back(m, k, std::move(terms));
  }
  return out;
}

}  // namespace isophasal
