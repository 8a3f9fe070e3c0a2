#include "nktoric/nk_core.hpp"

#include <stdexcept>

namespace nktoric {

NKPotential::NKPotential(Poly3 phi)
    : phi_(std::move(phi)),
      eps2_(epsilon_squared(phi_)),
      cvv_(c_vv(phi_)),
      hess_(hessian(phi_)),
      residual_(det3(hess_) - nk_operator(phi_)) {}

ConeMoments cone_moments(const ConePoint& p) {
  if (!(p.r > 0.0)) throw std::invalid_argument("cone radius must be positive");
  const double r3 = p.r * p.r * p.r;
  ConeMoments out;
  for (int i = 0; i < 3; ++i) out.nu[i] = r3 * p.mu[i] / 3.0;
  out.eps_n = -0.25 * r3 * p.r * p.eps;
  return out;
}

}  // namespace nktoric
