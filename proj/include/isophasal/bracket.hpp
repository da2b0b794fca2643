#pragma once

// Skew-symmetric bilinear maps R^m x R^m -> R^k and their j-maps.

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace isophasal {

/// Skew-symmetric bilinear map stored as k skew m x m matrices,
/// component(p)(i, j) = <[e_i, e_j], Z_p>. Immutable after construction.
class Bracket {
 public:
  /// Zero bracket.
  Bracket(int m, int k);

  /// Throws std::invalid_argument unless every component is m x m and skew
  /// to 1e-12; the stored tensor is then exactly skew.
  explicit Bracket(const std::vector<Eigen::MatrixXd>& components);

  int m() const { return m_; }
  int k() const { return static_cast<int>(lambda_.size()); }

  double operator()(int p, int i, int j) const { return lambda_[p](i, j); }
  const Eigen::MatrixXd& component(int p) const { return lambda_[p]; }

  /// [x, y] in R^k.
  Eigen::VectorXd apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  /// The bracket (x, y) -> [A x, A y].
  Bracket conjugated(const Eigen::MatrixXd& a) const;
  Bracket scaled(double factor) const;

  bool is_zero() const;

 private:
  int m_;
  std::vector<Eigen::MatrixXd> lambda_;
};

/// j(Z) with <[x, y], Z> = <j(Z) x, y>.
Eigen::MatrixXd jmap(const Bracket& b, const Eigen::VectorXd& z);

/// Singular values of j(Z), descending. Eigenvalues of j(Z) are +-i mu and 0.
Eigen::VectorXd spectrum(const Bracket& b, const Eigen::VectorXd& z);

struct IsospectralityReport {
  bool isospectral = false;
  double max_deviation = 0.0;  // worst max-abs spectral difference over samples
  int n_checked = 0;
};

/// Compares spectra at the k coordinate axes plus n_samples uniform points on
/// the unit sphere of R^k.
IsospectralityReport check_isospectral(const Bracket& b1, const Bracket& b2, int n_samples,
                                       double tol, std::uint64_t seed = 0x15095);

/// Orthogonal A with A^T j1(Z) A = j2(Z).
struct ConjugatorReport {
  Eigen::MatrixXd a;
  double residual_conj = 0.0;  // ||A^T j1 A - j2||_F
  double residual_orth = 0.0;  // ||A^T A - I||_F
};

/// Orthogonal U with U^T S U in real canonical form: 2x2 blocks [[0,-mu],[mu,0]]
/// ordered by descending mu, zero block last.
struct CanonicalForm {
  Eigen::MatrixXd basis;  // U
  Eigen::VectorXd mu;     // one entry per 2x2 block
};

CanonicalForm skew_canonical_form(const Eigen::MatrixXd& skew, double rank_tol = 1e-10);

/// Throws SpectraMismatch when the spectra differ by more than tol.
ConjugatorReport conjugator(const Bracket& b1, const Bracket& b2, const Eigen::VectorXd& z,
                            double tol);

/// Composes the two canonical reductions without checking spectra. Only useful
/// for negative controls.
ConjugatorReport aligning_rotation(const Bracket& b1, const Bracket& b2,
                                   const Eigen::VectorXd& z);

/// Dimension of the commutant of {j(Z_1), ..., j(Z_k)} in so(m).
int centralizer_dim(const Bracket& b, double rank_tol = 1e-10);

/// m(m-1)/2 - floor(m/2)(floor(m/2)+2); may be negative.
int gw_dimension_bound(int m);

enum class ExampleBracket { Cross1, Cross2, Quaternion };

/// The m = 6, k = 3 triple: x*x' + y*y', x*x' - y*y', and the quaternion
/// bracket on H x R^2 whose j-map is left multiplication by Z.
Bracket example_bracket(ExampleBracket which);

/// Necessary-condition fingerprint for bracket equivalence.
std::vector<double> equivalence_invariants(const Bracket& b,
                                           const std::vector<Eigen::VectorXd>& grid);

bool fingerprints_match(const std::vector<double>& a, const std::vector<double>& b,
                        double tol = 1e-9);

// Plain-text tensor format: header "m k", then one "p i j value" line per
// nonzero entry with 1-based indices and i < j.
Bracket read_bracket(std::istream& in);
Bracket read_bracket_file(const std::string& path);
void write_bracket(std::ostream& out, const Bracket& b);

}  // namespace isophasal
