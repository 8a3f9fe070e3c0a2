#pragma once

// Pointwise geometry of a potential phi on the moment space: the skew
// matrix mu-hat, the 6x6 metric matrix D, the admissible regions U0 and
// U0-hat, the operator j = C^{-1} mu-hat, singular orbits and the boundary
// of the moment image.

#include "nktoric/poly3.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace nktoric {

using Vec3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// A polynomial flattened for fast repeated floating evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const RealPoly3& p);

  double operator()(const Vec3& x) const;
  int degree() const { return degree_; }

 private:
  struct Term {
    double coeff;
    Exponent e;
  };
  std::vector<Term> terms_;
  int degree_ = -1;
};

/// phi and the polynomials derived from it, ready for numeric evaluation.
class PotentialField {
 public:
  explicit PotentialField(const Poly3& phi);

  double phi(const Vec3& x) const { return phi_(x); }
  /// (8/3)(1 - d_r) phi
  double eps2(const Vec3& x) const { return eps2_(x); }
  /// (d_r^2 - d_r) phi
  double cvv(const Vec3& x) const { return cvv_(x); }
  Matrix3 hessian(const Vec3& x) const;
  Vec3 grad_eps2(const Vec3& x) const;
  Vec3 grad_cvv(const Vec3& x) const;
  Matrix3 hessian_eps2(const Vec3& x) const;
  Matrix3 hessian_cvv(const Vec3& x) const;

 private:
  CompiledPoly phi_, eps2_, cvv_;
  std::array<CompiledPoly, 6> hess_;  // upper triangle, row-major
  std::array<CompiledPoly, 3> grad_eps2_, grad_cvv_;
  std::array<CompiledPoly, 6> hess_eps2_, hess_cvv_;
};

/// Skew matrix with entry (j,k) = sum_i sign(ijk) mu_i; mu spans its kernel.
Matrix3 mu_hat(const Vec3& mu);

/// [[Hess phi, -mu_hat], [mu_hat, Hess phi]] at a point.
Matrix6 metric_d(const PotentialField& field, const Vec3& mu);

/// Leading-principal-minor test on the matrix scaled by its largest entry.
template <int N>
bool is_positive_definite(const Eigen::Matrix<double, N, N>& a, double tol = 1e-10) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return false;
  const Eigen::Matrix<double, N, N> s = a / scale;
  for (int k = 1; k <= N; ++k) {
    if (!(s.topLeftCorner(k, k).determinant() > tol)) return false;
  }
  return true;
}

/// (1 - d_r) phi > 0 and D positive definite.
bool in_U0(const PotentialField& field, const Vec3& mu);
/// (1 - d_r) phi > 0 and Hess phi positive definite.
bool in_U0_hat(const PotentialField& field, const Vec3& mu);

/// j = C^{-1} mu_hat. Throws std::domain_error where Hess phi is singular.
Matrix3 j_operator(const PotentialField& field, const Vec3& mu);

struct JSpectrum {
  std::array<double, 3> eigenvalues{};  // ascending
  double predicted = 0.0;               // -C(V,V)/det C, expected twice
  double max_mismatch = 0.0;            // against {predicted, predicted, 0}
};

/// Eigenvalues of j^2 against the prediction. Throws std::domain_error outside U0-hat.
JSpectrum j_squared_spectrum_check(const PotentialField& field, const Vec3& mu);

struct SingularOrbit {
  Vec3 point;
  Vec3 collapse_direction;  // unit vector along mu
  double eps2 = 0.0;        // residuals at the refined point
  double cvv = 0.0;
};

struct SingularOrbitOptions {
  double newton_tol = 1e-10;
  double dedup_distance = 1e-4;
  int max_iterations = 100;
};

/// Common isolated zeros of eps^2 and C(V,V) inside the ball of the given
/// radius, refined by Gauss-Newton from quasi-random seeds.
///
/// Two surfaces in three dimensions meet in a curve unless they are tangent,
/// so isolated common zeros also satisfy grad eps^2 x grad C(V,V) = 0; the
/// refinement solves that augmented system, which stays nondegenerate at
/// such points. Results are sorted lexicographically.
std::vector<SingularOrbit> find_singular_orbits(const Poly3& phi, double radius, int seeds,
                                                const SingularOrbitOptions& options = {});

struct BoundaryPoint {
  Vec3 direction;  // unit
  double radius = 0.0;
  Vec3 point;
};

struct BoundaryOptions {
  double max_radius = 10.0;
  double scan_step = 1e-2;
  double tol = 1e-13;
  /// Directions appended to the Fibonacci sample.
  std::vector<Vec3> extra_directions;
  /// Also shoot rays along the six coordinate half-axes.
  bool include_axes = true;
  /// Also shoot rays through the singular orbits (the nodes of the surface).
  bool include_singular_orbits = true;
};

/// Quasi-uniform unit vectors (Fibonacci lattice).
std::vector<Vec3> fibonacci_sphere(int n);

/// Smallest r > 0 with eps^2(r u) = 0, found by scanning and bisection on a
/// segment where eps^2 decreases. Throws std::runtime_error without a root
/// below max_radius and std::domain_error if eps^2(0) <= 0.
double boundary_ray(const PotentialField& field, const Vec3& direction, const BoundaryOptions& options = {});

/// Point cloud of the moment-image boundary.
std::vector<BoundaryPoint> boundary_surface(const Poly3& phi, int directions, const BoundaryOptions& options = {});

}  // namespace nktoric
