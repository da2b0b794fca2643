#pragma once

// Node sets on the unit cube [0, 1)^d and one-dimensional Gauss rules.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace isophasal {

enum class QuadratureMethod { QMC, MC, TensorGauss };

std::string to_string(QuadratureMethod method);
/// Accepts qmc, mc, tensor_gauss (case-insensitive); throws std::invalid_argument.
QuadratureMethod parse_method(const std::string& name);

struct NodeSet {
  Eigen::MatrixXd points;       // dim x n
  std::vector<double> weights;  // unit-cube weights, sum 1
  int dim() const { return static_cast<int>(points.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
};

/// First n points of the Sobol sequence after the origin, equal weights.
NodeSet sobol_points(int dim, std::size_t n);

/// Uniform shift in [0, 1)^dim derived from (seed, replicate).
Eigen::VectorXd random_shift(int dim, std::uint64_t seed, int replicate);

/// Cranley-Patterson rotation: frac(points + shift).
NodeSet shifted(const NodeSet& nodes, const Eigen::VectorXd& shift);

NodeSet mc_points(int dim, std::size_t n, std::uint64_t seed, int replicate);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch; Legendre on [-1, 1], Hermite for the weight exp(-x^2).
GaussRule gauss_legendre(int n);
GaussRule gauss_hermite(int n);

/// Largest q with q^dim <= n (at least 1).
int tensor_order(int dim, std::size_t n);

/// Product Gauss-Legendre rule with q points per axis, mapped to [0, 1)^dim.
NodeSet tensor_gauss(int dim, int q);

}  // namespace isophasal
