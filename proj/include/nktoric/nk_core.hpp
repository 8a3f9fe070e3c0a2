#pragma once

// The toric nearly Kaehler equation
//
//   det Hess phi = (8/3 - (11/3) d_r + d_r^2) phi,    d_r = sum_i mu_i d/dmu_i,
//
// and the quantities attached to a potential phi: the squared volume
// eps^2 = (8/3)(1 - d_r) phi and C(V,V) = (d_r^2 - d_r) phi with V = mu.

#include "nktoric/mat3.hpp"
#include "nktoric/poly3.hpp"

#include <array>

namespace nktoric {

template <class C>
BasicPoly3<C> epsilon_squared(const BasicPoly3<C>& phi) {
  return (phi - euler(phi)) * CoeffTraits<C>::from_rational(Rational(8, 3));
}

template <class C>
BasicPoly3<C> c_vv(const BasicPoly3<C>& phi) {
  const BasicPoly3<C> e = euler(phi);
  return euler(e) - e;
}

/// (8/3 - (11/3) d_r + d_r^2) phi.
template <class C>
BasicPoly3<C> nk_operator(const BasicPoly3<C>& phi) {
  const BasicPoly3<C> e = euler(phi);
  BasicPoly3<C> out = phi * CoeffTraits<C>::from_rational(Rational(8, 3));
  out -= e * CoeffTraits<C>::from_rational(Rational(11, 3));
  out += euler(e);
  return out;
}

/// det Hess phi minus the right-hand side; the zero polynomial iff phi solves
/// the equation identically.
template <class C>
BasicPoly3<C> star_residual(const BasicPoly3<C>& phi) {
  return det3(hessian(phi)) - nk_operator(phi);
}

/// det Hess phi - eps^2 - C(V,V). Agrees with star_residual for every phi.
template <class C>
BasicPoly3<C> su3_identity_check(const BasicPoly3<C>& phi) {
  return det3(hessian(phi)) - epsilon_squared(phi) - c_vv(phi);
}

/// The collapsing direction field; V = mu in moment coordinates.
inline std::array<double, 3> v_vector(const std::array<double, 3>& mu) { return mu; }

/// phi together with its derived polynomials, computed once.
class NKPotential {
 public:
  explicit NKPotential(Poly3 phi);

  const Poly3& phi() const { return phi_; }
  const Poly3& eps2() const { return eps2_; }
  const Poly3& cvv() const { return cvv_; }
  const PolyMat3& hess() const { return hess_; }
  const Poly3& residual() const { return residual_; }

  bool solves_equation() const { return residual_.is_zero(); }

 private:
  Poly3 phi_;
  Poly3 eps2_;
  Poly3 cvv_;
  PolyMat3 hess_;
  Poly3 residual_;
};

/// A point of the metric cone: radius r > 0 over the moment coordinates
/// (mu, eps) of the link.
struct ConePoint {
  double r = 1.0;
  std::array<double, 3> mu{};
  double eps = 0.0;
};

struct ConeMoments {
  std::array<double, 3> nu{};
  double eps_n = 0.0;
};

/// nu_N = r^3 mu / 3, eps_N = -r^4 eps / 4. Throws std::invalid_argument for r <= 0.
ConeMoments cone_moments(const ConePoint& p);

}  // namespace nktoric
