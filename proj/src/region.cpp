#include "nktoric/region.hpp"

#include "nktoric/mat3.hpp"
#include "nktoric/nk_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nktoric {
namespace {

constexpr int kMaxCompiledDegree = 31;

int upper_index(int i, int j) {
  if (i > j) std::swap(i, j);
  static constexpr int kIndex[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return kIndex[i][j];
}

std::array<CompiledPoly, 6> compile_hessian(const Poly3& p) {
  const PolyMat3 h = hessian(p);
  std::array<CompiledPoly, 6> out;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) out[upper_index(i, j)] = CompiledPoly(to_real(h(i, j)));
  }
  return out;
}

std::array<CompiledPoly, 3> compile_gradient(const Poly3& p) {
  const auto g = gradient(p);
  return {CompiledPoly(to_real(g[0])), CompiledPoly(to_real(g[1])), CompiledPoly(to_real(g[2]))};
}

Matrix3 eval_sym(const std::array<CompiledPoly, 6>& h, const Vec3& x) {
  Matrix3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      m(i, j) = h[upper_index(i, j)](x);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

// Radical-inverse sequences for quasi-random seeds.
double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

}  // namespace

CompiledPoly::CompiledPoly(const RealPoly3& p) : degree_(p.degree()) {
  if (degree_ > kMaxCompiledDegree) throw std::invalid_argument("polynomial degree too large to compile");
  terms_.reserve(p.size());
  for (const auto& [e, c] : p.terms()) terms_.push_back({c, e});
}

double CompiledPoly::operator()(const Vec3& x) const {
  if (terms_.empty()) return 0.0;
  std::array<std::array<double, kMaxCompiledDegree + 1>, 3> pw;
  for (int i = 0; i < 3; ++i) {
    pw[i][0] = 1.0;
    for (int k = 1; k <= degree_; ++k) pw[i][k] = pw[i][k - 1] * x[i];
  }
  double sum = 0.0;
  for (const Term& t : terms_) sum += t.coeff * pw[0][t.e[0]] * pw[1][t.e[1]] * pw[2][t.e[2]];
  return sum;
}

PotentialField::PotentialField(const Poly3& phi) {
  const Poly3 e2 = epsilon_squared(phi);
  const Poly3 cv = c_vv(phi);
  phi_ = CompiledPoly(to_real(phi));
  eps2_ = CompiledPoly(to_real(e2));
  cvv_ = CompiledPoly(to_real(cv));
  hess_ = compile_hessian(phi);
  grad_eps2_ = compile_gradient(e2);
  grad_cvv_ = compile_gradient(cv);
  hess_eps2_ = compile_hessian(e2);
  hess_cvv_ = compile_hessian(cv);
}

Matrix3 PotentialField::hessian(const Vec3& x) const { return eval_sym(hess_, x); }
Matrix3 PotentialField::hessian_eps2(const Vec3& x) const { return eval_sym(hess_eps2_, x); }
Matrix3 PotentialField::hessian_cvv(const Vec3& x) const { return eval_sym(hess_cvv_, x); }

Vec3 PotentialField::grad_eps2(const Vec3& x) const {
  return Vec3(grad_eps2_[0](x), grad_eps2_[1](x), grad_eps2_[2](x));
}

Vec3 PotentialField::grad_cvv(const Vec3& x) const {
  return Vec3(grad_cvv_[0](x), grad_cvv_[1](x), grad_cvv_[2](x));
}

Matrix3 mu_hat(const Vec3& mu) {
  Matrix3 m;
  m << 0.0, mu[2], -mu[1],
      -mu[2], 0.0, mu[0],
      mu[1], -mu[0], 0.0;
  return m;
}

Matrix6 metric_d(const PotentialField& field, const Vec3& mu) {
  const Matrix3 c = field.hessian(mu);
  const Matrix3 m = mu_hat(mu);
  Matrix6 d;
  d << c, -m, m, c;
  return d;
}

bool in_U0(const PotentialField& field, const Vec3& mu) {
  return field.eps2(mu) > 0.0 && is_positive_definite(metric_d(field, mu));
}

bool in_U0_hat(const PotentialField& field, const Vec3& mu) {
  return field.eps2(mu) > 0.0 && is_positive_definite(Matrix3(field.hessian(mu)));
}

Matrix3 j_operator(const PotentialField& field, const Vec3& mu) {
  const Matrix3 c = field.hessian(mu);
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if (std::abs(c.determinant()) <= 1e-14 * scale * scale * scale) {
    throw std::domain_error("Hess phi is singular at this point");
  }
  return c.partialPivLu().solve(mu_hat(mu));
}

JSpectrum j_squared_spectrum_check(const PotentialField& field, const Vec3& mu) {
  if (!in_U0_hat(field, mu)) throw std::domain_error("point lies outside U0-hat");
  const Matrix3 j = j_operator(field, mu);
  const Matrix3 j2 = j * j;
  Eigen::EigenSolver<Matrix3> solver(j2, false);
  JSpectrum out;
  std::array<double, 3> eigs;
  double imag = 0.0;
  for (int i = 0; i < 3; ++i) {
    eigs[i] = solver.eigenvalues()[i].real();
    imag = std::max(imag, std::abs(solver.eigenvalues()[i].imag()));
  }
  std::sort(eigs.begin(), eigs.end());
  out.eigenvalues = eigs;
  out.predicted = -field.cvv(mu) / field.hessian(mu).determinant();
  std::array<double, 3> expected{out.predicted, out.predicted, 0.0};
  std::sort(expected.begin(), expected.end());
  out.max_mismatch = imag;
  for (int i = 0; i < 3; ++i) out.max_mismatch = std::max(out.max_mismatch, std::abs(eigs[i] - expected[i]));
  return out;
}

std::vector<SingularOrbit> find_singular_orbits(const Poly3& phi, double radius, int seeds,
                                                const SingularOrbitOptions& options) {
  if (seeds <= 0) throw std::invalid_argument("seeds must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const PotentialField field(phi);

  using Residual = Eigen::Matrix<double, 5, 1>;
  using Jacobian = Eigen::Matrix<double, 5, 3>;
  auto residual = [&](const Vec3& x, Residual& g, Jacobian* jac) {
    const Vec3 ge = field.grad_eps2(x);
    const Vec3 gc = field.grad_cvv(x);
    g[0] = field.eps2(x);
    g[1] = field.cvv(x);
    g.tail<3>() = ge.cross(gc);
    if (jac) {
      jac->row(0) = ge.transpose();
      jac->row(1) = gc.transpose();
      // mu_hat(v) w = w x v, so d(ge x gc) = mu_hat(gc) dge - mu_hat(ge) dgc.
      jac->bottomRows<3>() = mu_hat(gc) * field.hessian_eps2(x) - mu_hat(ge) * field.hessian_cvv(x);
    }
  };

  std::vector<SingularOrbit> found;
  for (int s = 0; s < seeds; ++s) {
    // Halton point in the cube, mapped into the ball by radial rescaling.
    Vec3 u(2.0 * halton(s + 1, 2) - 1.0, 2.0 * halton(s + 1, 3) - 1.0, 2.0 * halton(s + 1, 5) - 1.0);
    Vec3 x = radius * u / std::sqrt(3.0);
    Residual g;
    Jacobian jac;
    residual(x, g, &jac);
    double norm = g.norm();
    bool converged = false;
    for (int it = 0; it < options.max_iterations && std::isfinite(norm); ++it) {
      const Vec3 step = jac.colPivHouseholderQr().solve(-g);
      double lambda = 1.0;
      Vec3 trial;
      Residual gt;
      double trial_norm = norm;
      for (int k = 0; k < 30; ++k, lambda *= 0.5) {
        trial = x + lambda * step;
        residual(trial, gt, nullptr);
        trial_norm = gt.norm();
        if (trial_norm < norm) break;
      }
      if (!(trial_norm < norm)) break;
      const double moved = (trial - x).norm();
      x = trial;
      residual(x, g, &jac);
      norm = g.norm();
      if (moved <= 1e-15 * std::max(1.0, x.norm()) || norm == 0.0) break;
      if (x.norm() > 4.0 * radius) break;
    }
    const double scale = std::max(1.0, std::abs(field.eps2(Vec3::Zero())));
    converged = std::abs(field.eps2(x)) < options.newton_tol * scale &&
                std::abs(field.cvv(x)) < options.newton_tol * scale && x.norm() <= radius && x.norm() > 0.0;
    if (!converged) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const SingularOrbit& o) {
      return (o.point - x).norm() < options.dedup_distance;
    });
    if (duplicate) continue;
    found.push_back({x, x.normalized(), field.eps2(x), field.cvv(x)});
  }
  std::sort(found.begin(), found.end(), [](const SingularOrbit& a, const SingularOrbit& b) {
    return std::lexicographical_compare(a.point.data(), a.point.data() + 3, b.point.data(), b.point.data() + 3);
  });
  return found;
}

std::vector<Vec3> fibonacci_sphere(int n) {
  if (n <= 0) throw std::invalid_argument("direction count must be positive");
  std::vector<Vec3> out;
  out.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double theta = golden * i;
    out.emplace_back(rho * std::cos(theta), rho * std::sin(theta), z);
  }
  return out;
}

double boundary_ray(const PotentialField& field, const Vec3& direction, const BoundaryOptions& options) {
  const Vec3 u = direction.normalized();
  const double e0 = field.eps2(Vec3::Zero());
  if (!(e0 > 0.0)) throw std::domain_error("eps^2 must be positive at the origin");
  auto eps = [&](double r) { return field.eps2(r * u); };
  auto cvv = [&](double r) { return field.cvv(r * u); };
  auto bisect = [&](double lo, double hi, auto&& f) {
    // f(lo) > 0 >= f(hi)
    while (hi - lo > options.tol * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (f(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return std::make_pair(lo, hi);
  };

  const double touch_tol = 1e-12 * e0;
  double prev = 0.0;
  for (double r = options.scan_step; prev < options.max_radius; r += options.scan_step) {
    r = std::min(r, options.max_radius);
    if (eps(r) <= 0.0) {
      auto [lo, hi] = bisect(prev, r, eps);
      return 0.5 * (lo + hi);
    }
    if (cvv(r) <= 0.0) {
      // eps^2 stops decreasing inside (prev, r]: locate its minimum on the ray.
      auto [lo, hi] = bisect(prev, r, cvv);
      const double rc = 0.5 * (lo + hi);
      const double ec = eps(rc);
      if (ec <= 0.0) {
        auto [elo, ehi] = bisect(prev, rc, eps);
        return 0.5 * (elo + ehi);
      }
      if (ec <= touch_tol) return rc;
      throw std::runtime_error("eps^2 has a positive minimum along the ray");
    }
    prev = r;
  }
  throw std::runtime_error("no sign change of eps^2 within the maximum radius");
}

std::vector<BoundaryPoint> boundary_surface(const Poly3& phi, int directions, const BoundaryOptions& options) {
  const PotentialField field(phi);
  std::vector<Vec3> dirs = fibonacci_sphere(directions);
  dirs.insert(dirs.end(), options.extra_directions.begin(), options.extra_directions.end());
  if (options.include_axes) {
    for (int i = 0; i < 3; ++i) {
      dirs.push_back(Vec3::Unit(i));
      dirs.push_back(-Vec3::Unit(i));
    }
  }
  if (options.include_singular_orbits) {
    for (const SingularOrbit& o : find_singular_orbits(phi, options.max_radius, 64)) {
      dirs.push_back(o.collapse_direction);
    }
  }
  std::vector<BoundaryPoint> out;
  out.reserve(dirs.size());
  for (const Vec3& d : dirs) {
    const Vec3 u = d.normalized();
    const double r = boundary_ray(field, u, options);
    out.push_back({u, r, r * u});
  }
  return out;
}

}  // namespace nktoric
