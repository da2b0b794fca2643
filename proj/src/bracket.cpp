#include "isophasal/bracket.hpp"

#include "isophasal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace isophasal {

Bracket::Bracket(int m, int k) : m_(m), lambda_(k, Eigen::MatrixXd::Zero(m, m)) {
  if (m < 1 || k < 1) throw std::invalid_argument("bracket dimensions must be positive");
}

Bracket::Bracket(const std::vector<Eigen::MatrixXd>& components) {
  if (components.empty()) throw std::invalid_argument("bracket needs at least one component");
  m_ = static_cast<int>(components.front().rows());
  if (m_ < 1) throw std::invalid_argument("bracket dimensions must be positive");
  lambda_.reserve(components.size());
  for (const auto& c : components) {
    if (c.rows() != m_ || c.cols() != m_)
      throw std::invalid_argument("bracket component is not m x m");
    if (!c.allFinite()) throw std::invalid_argument("bracket component is not finite");
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((c + c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("bracket component is not skew-symmetric");
    Eigen::MatrixXd skew = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = i + 1; j < m_; ++j) {
        skew(i, j) = c(i, j);
        skew(j, i) = -c(i, j);
      }
    lambda_.push_back(std::move(skew));
  }
}

Eigen::VectorXd Bracket::apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (x.size() != m_ || y.size() != m_) throw DimensionMismatch("bracket argument has wrong size");
  Eigen::VectorXd out(k());
  for (int p = 0; p < k(); ++p) out[p] = x.dot(lambda_[p] * y);
  return out;
}

Bracket Bracket::conjugated(const Eigen::MatrixXd& a) const {
  if (a.rows() != m_ || a.cols() != m_) throw DimensionMismatch("conjugating matrix is not m x m");
  std::vector<Eigen::MatrixXd> comps;
  for (const auto& l : lambda_) {
    Eigen::MatrixXd c = a.transpose() * l * a;
    comps.push_back(0.5 * (c - c.transpose()));
  }
  return Bracket(comps);
}

Bracket Bracket::scaled(double factor) const {
  std::vector<Eigen::MatrixXd> comps;
  for (const auto& l : lambda_) comps.push_back(factor * l);
  return Bracket(comps);
}

bool Bracket::is_zero() const {
  return std::all_of(lambda_.begin(), lambda_.end(),
                     [](const Eigen::MatrixXd& l) { return l.isZero(0.0); });
}

Eigen::MatrixXd jmap(const Bracket& b, const Eigen::VectorXd& z) {
  if (z.size() != b.k()) throw DimensionMismatch("Z has wrong dimension for bracket");
  if (!z.allFinite()) throw std::invalid_argument("Z is not finite");
  // <[x,y],Z> = x^T L y with L = sum_p Z_p Lambda_p, and <j x, y> = y^T j x,
  // so j = L^T = -L.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(b.m(), b.m());
  for (int p = 0; p < b.k(); ++p) j -= z[p] * b.component(p);
  return j;
}

Eigen::VectorXd spectrum(const Bracket& b, const Eigen::VectorXd& z) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jmap(b, z));
  return svd.singularValues();  // already descending
}

namespace {

double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

void require_same_shape(const Bracket& b1, const Bracket& b2) {
  if (b1.m() != b2.m() || b1.k() != b2.k())
    throw DimensionMismatch("brackets have different (m, k)");
}

}  // namespace

IsospectralityReport check_isospectral(const Bracket& b1, const Bracket& b2, int n_samples,
                                       double tol, std::uint64_t seed) {
  require_same_shape(b1, b2);
  const int k = b1.k();
  std::vector<Eigen::VectorXd> samples;
  for (int p = 0; p < k; ++p) samples.push_back(Eigen::VectorXd::Unit(k, p));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd z(k);
    do {
      for (int p = 0; p < k; ++p) z[p] = normal(rng);
    } while (z.norm() < 1e-8);
    samples.push_back(z.normalized());
  }
  IsospectralityReport report;
  for (const auto& z : samples) {
    report.max_deviation = std::max(report.max_deviation, max_abs_diff(spectrum(b1, z), spectrum(b2, z)));
    ++report.n_checked;
  }
  report.isospectral = report.max_deviation <= tol;
  return report;
}

CanonicalForm skew_canonical_form(const Eigen::MatrixXd& s, double rank_tol) {
  const int m = static_cast<int>(s.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.transpose() * s);
  // Descending mu^2.
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  // |S v| is accurate to eps * mu_max; sqrt of a tiny eigenvalue of S^T S is not.
  Eigen::VectorXd mu_est(m);
  Eigen::MatrixXd cand(m, m);
  for (int c = 0; c < m; ++c) {
    cand.col(c) = eig.eigenvectors().col(order[c]);
    mu_est[c] = (s * cand.col(c)).norm();
  }
  const double mu_max = mu_est.size() > 0 ? mu_est.maxCoeff() : 0.0;
  const double zero_cut = rank_tol * std::max(mu_max, 1e-300);
  const double cluster_tol = 1e-8 * std::max(mu_max, 1.0);

  CanonicalForm out;
  out.basis = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> mus;
  int filled = 0;

  auto residual = [&](Eigen::VectorXd v) {
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < filled; ++c) v -= out.basis.col(c).dot(v) * out.basis.col(c);
    return v;
  };
  auto push = [&](const Eigen::VectorXd& v) { out.basis.col(filled++) = v.normalized(); };

  int start = 0;
  while (start < m) {
    const double mu_here = mu_est[start];
    const bool zero_block = mu_here <= zero_cut;
    int end = start + 1;
    if (zero_block) {
      end = m;
    } else {
      while (end < m && std::abs(mu_est[end] - mu_here) <= cluster_tol) ++end;
    }
    const int target = filled + (end - start);
    while (filled < target && filled < m) {
      // Pivot on the candidate with the largest component outside the span so far.
      int best = -1;
      double best_norm = -1.0;
      Eigen::VectorXd best_vec;
      for (int c = start; c < end; ++c) {
        Eigen::VectorXd r = residual(cand.col(c));
        const double nr = r.norm();
        if (nr > best_norm + 1e-12) {
          best_norm = nr;
          best = c;
          best_vec = r;
        }
      }
      if (best < 0 || best_norm < 1e-6) break;
      push(best_vec);
      if (!zero_block && filled < m) {
        const Eigen::VectorXd a = out.basis.col(filled - 1);
        Eigen::VectorXd sa = residual(s * a);
        mus.push_back(sa.norm());
        push(sa);
      }
    }
    start = end;
  }
  // Rounding can leave a direction unfilled in nearly-degenerate input; complete
  // with the standard basis.
  for (int e = 0; filled < m && e < m; ++e) {
    Eigen::VectorXd r = residual(Eigen::VectorXd::Unit(m, e));
    if (r.norm() > 1e-6) push(r);
  }
  out.mu = Eigen::Map<Eigen::VectorXd>(mus.data(), static_cast<Eigen::Index>(mus.size()));
  return out;
}

namespace {

ConjugatorReport compose(const Eigen::MatrixXd& j1, const Eigen::MatrixXd& j2) {
  const CanonicalForm c1 = skew_canonical_form(j1);
  const CanonicalForm c2 = skew_canonical_form(j2);
  ConjugatorReport r;
  r.a = c1.basis * c2.basis.transpose();
  const int m = static_cast<int>(j1.rows());
  r.residual_conj = (r.a.transpose() * j1 * r.a - j2).norm();
  r.residual_orth = (r.a.transpose() * r.a - Eigen::MatrixXd::Identity(m, m)).norm();
  return r;
}

}  // namespace

ConjugatorReport conjugator(const Bracket& b1, const Bracket& b2, const Eigen::VectorXd& z,
                            double tol) {
  require_same_shape(b1, b2);
  const double dev = max_abs_diff(spectrum(b1, z), spectrum(b2, z));
  if (dev > tol) {
    std::ostringstream msg;
    msg << "spectra differ by " << dev << " (tol " << tol << ")";
    throw SpectraMismatch(msg.str());
  }
  return compose(jmap(b1, z), jmap(b2, z));
}

ConjugatorReport aligning_rotation(const Bracket& b1, const Bracket& b2,
                                   const Eigen::VectorXd& z) {
  require_same_shape(b1, b2);
  return compose(jmap(b1, z), jmap(b2, z));
}

int centralizer_dim(const Bracket& b, double rank_tol) {
  const int m = b.m();
  const int k = b.k();
  const int dim_so = m * (m - 1) / 2;
  std::vector<Eigen::MatrixXd> js;
  for (int p = 0; p < k; ++p) js.push_back(jmap(b, Eigen::VectorXd::Unit(k, p)));

  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k) * m * m, dim_so);
  int col = 0;
  for (int a = 0; a < m; ++a)
    for (int c = a + 1; c < m; ++c, ++col) {
      Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m, m);
      basis(a, c) = 1.0;
      basis(c, a) = -1.0;
      for (int p = 0; p < k; ++p) {
        Eigen::MatrixXd comm = basis * js[p] - js[p] * basis;
        op.block(static_cast<Eigen::Index>(p) * m * m, col, m * m, 1) =
            Eigen::Map<Eigen::VectorXd>(comm.data(), m * m);
      }
    }
  if (dim_so == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(op);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  if (smax == 0.0) return dim_so;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rank_tol * smax) ++rank;
  return dim_so - rank;
}

int gw_dimension_bound(int m) {
  if (m < 1) throw std::invalid_argument("m must be positive");
  const int half = m / 2;
  return m * (m - 1) / 2 - half * (half + 2);
}

namespace {

int levi_civita(int i, int j, int p) {
  if (i == j || j == p || i == p) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;  // cyclic (0,1,2) -> +1
}

// Quaternion basis product e_a * e_b = sign * e_c, a,b in {0 (=1), 1 (=i), 2 (=j), 3 (=k)}.
void quat_mul(int a, int b, int& c, int& sign) {
  if (a == 0) { c = b; sign = 1; return; }
  if (b == 0) { c = a; sign = 1; return; }
  if (a == b) { c = 0; sign = -1; return; }
  c = 6 - a - b;
  sign = levi_civita(a - 1, b - 1, c - 1);
}

}  // namespace

Bracket example_bracket(ExampleBracket which) {
  std::vector<Eigen::MatrixXd> comps(3, Eigen::MatrixXd::Zero(6, 6));
  switch (which) {
    case ExampleBracket::Cross1:
    case ExampleBracket::Cross2: {
      const double second = which == ExampleBracket::Cross1 ? 1.0 : -1.0;
      for (int p = 0; p < 3; ++p)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            comps[p](i, j) = levi_civita(i, j, p);
            comps[p](i + 3, j + 3) = second * levi_civita(i, j, p);
          }
      break;
    }
    case ExampleBracket::Quaternion: {
      // [q, q'] = Im(q' conj(q)); then j(Z) q = Z q (left multiplication).
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const int conj_sign = a == 0 ? 1 : -1;
          int c = 0;
          int sign = 0;
          quat_mul(b, a, c, sign);
          if (c == 0) continue;
          comps[c - 1](a, b) += conj_sign * sign;
        }
      break;
    }
  }
  return Bracket(comps);
}

namespace {

void signed_permutations(int k, std::vector<Eigen::MatrixXd>& out) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (int mask = 0; mask < (1 << k); ++mask) {
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
      for (int p = 0; p < k; ++p) c(p, perm[p]) = (mask >> p) & 1 ? -1.0 : 1.0;
      out.push_back(std::move(c));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

std::vector<double> equivalence_invariants(const Bracket& b,
                                           const std::vector<Eigen::VectorXd>& grid) {
  std::vector<double> fp;
  fp.push_back(centralizer_dim(b));

  const int m = b.m();
  const int k = b.k();
  Eigen::MatrixXd casimir = Eigen::MatrixXd::Zero(m, m);
  for (int p = 0; p < k; ++p) {
    const Eigen::MatrixXd j = jmap(b, Eigen::VectorXd::Unit(k, p));
    casimir += j * j;
  }
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
  for (int q = 1; q <= 4; ++q) {
    power = power * casimir;
    fp.push_back(power.trace());
  }

  std::vector<Eigen::MatrixXd> group;
  signed_permutations(k, group);
  for (const auto& z : grid) {
    std::vector<std::vector<double>> orbit;
    for (const auto& c : group) {
      const Eigen::VectorXd sp = spectrum(b, c * z);
      // Round away last-bit noise so the lexicographic sort is stable.
      std::vector<double> v(sp.size());
      for (Eigen::Index i = 0; i < sp.size(); ++i) v[i] = std::round(sp[i] * 1e10) / 1e10;
      orbit.push_back(std::move(v));
    }
    std::sort(orbit.begin(), orbit.end());
    for (const auto& v : orbit) fp.insert(fp.end(), v.begin(), v.end());
  }
  return fp;
}

bool fingerprints_match(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol * std::max(1.0, std::abs(a[i]))) return false;
  return true;
}

}  // namespace isophasal
