#include "isophasal/quadrature.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace isophasal {

std::string to_string(QuadratureMethod method) {
  switch (method) {
    case QuadratureMethod::QMC: return "qmc";
    case QuadratureMethod::MC: return "mc";
    case QuadratureMethod::TensorGauss: return "tensor_gauss";
  }
  return "qmc";
}

QuadratureMethod parse_method(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "qmc") return QuadratureMethod::QMC;
  if (s == "mc") return QuadratureMethod::MC;
  if (s == "tensor_gauss" || s == "tensorgauss") return QuadratureMethod::TensorGauss;
  throw std::invalid_argument("unknown quadrature method '" + name + "'");
}

NodeSet sobol_points(int dim, std::size_t n) {
  boost::random::sobol engine(static_cast<std::size_t>(dim));
  NodeSet out;
  out.points.resize(dim, static_cast<Eigen::Index>(n));
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  for (std::size_t j = 0; j < n; ++j)
    for (int d = 0; d < dim; ++d)
      out.points(d, static_cast<Eigen::Index>(j)) = static_cast<double>(engine() >> 11) * scale;
  out.weights.assign(n, 1.0 / static_cast<double>(n));
  return out;
}

Eigen::VectorXd random_shift(int dim, std::uint64_t seed, int replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), 0x5b1f7u};
  std::mt19937_64 rng(seq);
  Eigen::VectorXd shift(dim);
  constexpr double scale = 1.0 / 9007199254740992.0;
  for (int d = 0; d < dim; ++d) shift[d] = static_cast<double>(rng() >> 11) * scale;
  return shift;
}

NodeSet shifted(const NodeSet& nodes, const Eigen::VectorXd& shift) {
  NodeSet out = nodes;
  for (Eigen::Index j = 0; j < out.points.cols(); ++j)
    for (Eigen::Index d = 0; d < out.points.rows(); ++d) {
      double v = out.points(d, j) + shift[d];
      if (v >= 1.0) v -= 1.0;
      out.points(d, j) = v;
    }
  return out;
}

NodeSet mc_points(int dim, std::size_t n, std::uint64_t seed, int replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), 0x3c4du};
  std::mt19937_64 rng(seq);
  constexpr double scale = 1.0 / 9007199254740992.0;
  NodeSet out;
  out.points.resize(dim, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < out.points.cols(); ++j)
    for (int d = 0; d < dim; ++d) out.points(d, j) = static_cast<double>(rng() >> 11) * scale;
  out.weights.assign(n, 1.0 / static_cast<double>(n));
  return out;
}

namespace {

GaussRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const Eigen::Index n = offdiag.size() + 1;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) jac(i, i + 1) = jac(i + 1, i) = offdiag[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule rule;
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()[i]);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights.push_back(mu0 * v0 * v0);
  }
  return rule;
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(off, 2.0);
}

GaussRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(0.5 * k);
  return golub_welsch(off, std::sqrt(std::numbers::pi));
}

int tensor_order(int dim, std::size_t n) {
  int q = std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(n), 1.0 / dim))));
  while (std::pow(q + 1.0, dim) <= static_cast<double>(n)) ++q;
  while (q > 1 && std::pow(static_cast<double>(q), dim) > static_cast<double>(n)) --q;
  return q;
}

NodeSet tensor_gauss(int dim, int q) {
  const GaussRule g = gauss_legendre(q);
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(q);
  NodeSet out;
  out.points.resize(dim, static_cast<Eigen::Index>(total));
  out.weights.resize(total);
  std::vector<int> idx(dim, 0);
  for (std::size_t j = 0; j < total; ++j) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      out.points(d, static_cast<Eigen::Index>(j)) = 0.5 * (g.nodes[idx[d]] + 1.0);
      w *= 0.5 * g.weights[idx[d]];
    }
    out.weights[j] = w;
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < q) break;
      idx[d] = 0;
    }
  }
  return out;
}

}  // namespace isophasal
