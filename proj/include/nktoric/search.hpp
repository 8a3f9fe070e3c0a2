#pragma once

// Polynomial solutions: normalized ansatz phi = 3 + |mu|^2 + phi^3 + ... + phi^d,
// the coefficient system obtained by expanding the equation's residual, a
// least-squares Newton search over it, cubic canonicalization, the Hessian
// cone test and a suite of exact identities.

#include "nktoric/coeff_poly.hpp"
#include "nktoric/poly3.hpp"
#include "nktoric/region.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nktoric {

/// Monomials of total degree exactly k in graded-lex order.
std::vector<Exponent> monomials_of_degree(int k);

class Ansatz {
 public:
  /// Throws std::invalid_argument unless 3 <= degree <= 5.
  explicit Ansatz(int degree);

  int degree() const { return degree_; }
  /// Unknown slots: monomials of degrees 3..d in graded-lex order.
  const std::vector<Exponent>& unknowns() const { return unknowns_; }
  std::size_t unknown_count() const { return unknowns_.size(); }

  /// 3 + mu1^2 + mu2^2 + mu3^2.
  static Poly3 fixed_part();

  SymbolicPoly3 symbolic() const;
  RealPoly3 assemble(std::span<const double> coeffs) const;
  Poly3 assemble_exact(std::span<const Scalar> coeffs) const;

 private:
  int degree_;
  std::vector<Exponent> unknowns_;
};

struct CoeffEquation {
  Exponent monomial;  // which coefficient of the residual
  CoeffPoly poly;     // that coefficient as a polynomial in the unknowns
};

class CoeffSystem {
 public:
  CoeffSystem(Ansatz ansatz, std::vector<CoeffEquation> equations);

  const Ansatz& ansatz() const { return ansatz_; }
  /// One equation per monomial of degree <= the formal residual degree, in
  /// graded-lex order (identically zero ones included).
  const std::vector<CoeffEquation>& equations() const { return equations_; }
  std::size_t equation_count() const { return equations_.size(); }
  std::size_t nontrivial_count() const;
  std::map<int, int> equations_per_degree() const;

  /// Residual vector and optionally its Jacobian at a coefficient vector.
  void evaluate(std::span<const double> u, Eigen::VectorXd& f, Eigen::MatrixXd* jacobian) const;
  double residual_norm(std::span<const double> u) const;  // max-norm

 private:
  struct Term {
    double coeff;
    std::array<int, 3> vars;  // -1 padded
    int count;
  };
  Ansatz ansatz_;
  std::vector<CoeffEquation> equations_;
  std::vector<std::vector<Term>> compiled_;
};

/// Expands det Hess phi - (8/3 - 11/3 d_r + d_r^2) phi for the degree-d ansatz.
CoeffSystem build_system(int degree);

struct CubicCanonicalForm {
  double lambda = 0.0;
  /// Rows are unit linear forms l_i with cubic = lambda * l1 l2 l3, i.e. the
  /// substitution y = transform * mu maps the cubic to lambda y1 y2 y3.
  Matrix3 transform;
  double fit_residual = 0.0;
};

/// Factors a cubic form into three independent real linear forms. Returns
/// nullopt (not factorable) when det Hess is not proportional to the cubic
/// or its zero locus is not three distinct real lines.
std::optional<CubicCanonicalForm> canonicalize_cubic(const RealPoly3& cubic);

struct SearchResult {
  std::vector<double> coeffs;
  double residual_norm = 0.0;
  double higher_norm = 0.0;  // max |coeff| over degrees >= 4
  std::string classified_as;
  std::optional<double> lambda;
};

struct SearchOptions {
  double converge_tol = 1e-10;
  int max_iterations = 200;
  double start_box = 2.0;
  double dedup_distance = 1e-6;
  int jobs = 1;
};

struct SearchSummary {
  int starts = 0;
  std::uint64_t seed = 0;
  std::vector<SearchResult> converged;  // deduplicated, ordered by start index
};

/// Damped Gauss-Newton from uniform random starts; deterministic for a given
/// seed regardless of the job count.
SearchSummary newton_search(const CoeffSystem& system, int starts, std::uint64_t seed,
                            const SearchOptions& options = {});

/// Classifies a coefficient vector of the ansatz as "phi0-equivalent",
/// "higher-degree" or "unclassified".
SearchResult classify_solution(const CoeffSystem& system, std::vector<double> coeffs);

struct HesseConeResult {
  bool is_cone = false;
  std::vector<Vec3> kernel_directions;
};

/// Exact Hessian-determinant test; for cones, numerically recovers the
/// directions along which f is constant. Throws std::invalid_argument for
/// non-homogeneous input.
HesseConeResult hesse_cone_test(const Poly3& f);

struct LemmaReport {
  int quadratic_samples = 0;
  int quadratic_failures = 0;
  int expansion_samples = 0;
  int expansion_failures = 0;
  int bilinear_samples = 0;
  int bilinear_failures = 0;
  bool identity_pairing = false;  // polarized_det(I, I) == 3
  bool zero_pairing = false;      // polarized_det(N, 0) == 0

  bool ok() const {
    return quadratic_failures == 0 && expansion_failures == 0 && bilinear_failures == 0 && identity_pairing &&
           zero_pairing;
  }
};

/// Exact identities used in the nonexistence arguments:
///   det Hess(x B) = -2 x B det Hess_yz(B) for quadratics B(y, z),
/// the 2x2 expansion det(N4 + x N3 + x^2 N2) in polarized determinants, and
/// bilinearity of the polarized determinant.
LemmaReport lemma_identity_checks(int samples = 1000, std::uint64_t seed = 20240611);

}  // namespace nktoric
