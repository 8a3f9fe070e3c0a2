#include "nktoric/search.hpp"

#include "nktoric/mat3.hpp"
#include "nktoric/nk_core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace nktoric {
namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> cubic_coefficients(const RealPoly3& p) {
  std::vector<double> out;
  for (const Exponent& e : monomials_of_degree(3)) out.push_back(p.coefficient(e));
  return out;
}

RealPoly3 linear_form(const Vec3& l) {
  RealPoly3 p;
  p.add_term({1, 0, 0}, l[0]);
  p.add_term({0, 1, 0}, l[1]);
  p.add_term({0, 0, 1}, l[2]);
  return p;
}

Vec3 eval_gradient(const std::array<RealPoly3, 3>& g, const Vec3& x) {
  const std::array<double, 3> p{x[0], x[1], x[2]};
  return Vec3(eval(g[0], p), eval(g[1], p), eval(g[2], p));
}

// One damped Gauss-Newton run. Returns true with u updated on convergence.
bool gauss_newton(const CoeffSystem& system, std::vector<double>& u, const SearchOptions& options) {
  const std::size_t n = u.size();
  Eigen::VectorXd f;
  Eigen::MatrixXd jac;
  system.evaluate(u, f, &jac);
  double norm = f.norm();
  int polish = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (!std::isfinite(norm)) return false;
    if (f.lpNorm<Eigen::Infinity>() < options.converge_tol) {
      // A few extra steps to settle into machine precision.
      if (++polish > 3) break;
    }
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-f);
    std::vector<double> trial(n);
    Eigen::VectorXd ft;
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + lambda * step[static_cast<Eigen::Index>(i)];
      system.evaluate(trial, ft, nullptr);
      if (ft.norm() < norm) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    u = trial;
    system.evaluate(u, f, &jac);
    norm = f.norm();
  }
  return std::isfinite(norm) && f.lpNorm<Eigen::Infinity>() < options.converge_tol;
}

}  // namespace

std::vector<Exponent> monomials_of_degree(int k) {
  std::vector<Exponent> out;
  for (int a = k; a >= 0; --a) {
    for (int b = k - a; b >= 0; --b) out.push_back({a, b, k - a - b});
  }
  return out;
}

Ansatz::Ansatz(int degree) : degree_(degree) {
  if (degree < 3 || degree > 5) throw std::invalid_argument("ansatz degree must be 3, 4 or 5");
  for (int k = 3; k <= degree; ++k) {
    const auto mons = monomials_of_degree(k);
    unknowns_.insert(unknowns_.end(), mons.begin(), mons.end());
  }
}

Poly3 Ansatz::fixed_part() {
  Poly3 p = Poly3::constant(Scalar(3));
  for (const Exponent& e : std::vector<Exponent>{{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}) p.add_term(e, Scalar(1));
  return p;
}

SymbolicPoly3 Ansatz::symbolic() const {
  SymbolicPoly3 p = fixed_part().map_coefficients([](const Scalar& c) { return CoeffPoly(c.rational_part()); });
  for (std::size_t i = 0; i < unknowns_.size(); ++i) p.add_term(unknowns_[i], CoeffPoly::variable(static_cast<int>(i)));
  return p;
}

RealPoly3 Ansatz::assemble(std::span<const double> coeffs) const {
  if (coeffs.size() != unknowns_.size()) throw std::invalid_argument("coefficient count mismatch");
  RealPoly3 p = to_real(fixed_part());
  for (std::size_t i = 0; i < unknowns_.size(); ++i) p.add_term(unknowns_[i], coeffs[i]);
  return p;
}

Poly3 Ansatz::assemble_exact(std::span<const Scalar> coeffs) const {
  if (coeffs.size() != unknowns_.size()) throw std::invalid_argument("coefficient count mismatch");
  Poly3 p = fixed_part();
  for (std::size_t i = 0; i < unknowns_.size(); ++i) p.add_term(unknowns_[i], coeffs[i]);
  return p;
}

CoeffSystem::CoeffSystem(Ansatz ansatz, std::vector<CoeffEquation> equations)
    : ansatz_(std::move(ansatz)), equations_(std::move(equations)) {
  compiled_.reserve(equations_.size());
  for (const CoeffEquation& eq : equations_) {
    std::vector<Term> terms;
    for (const auto& [mono, c] : eq.poly.terms()) {
      if (mono.size() > 3) throw std::logic_error("coefficient equation of degree > 3");
      Term t{c.get_d(), {-1, -1, -1}, static_cast<int>(mono.size())};
      std::copy(mono.begin(), mono.end(), t.vars.begin());
      terms.push_back(t);
    }
    compiled_.push_back(std::move(terms));
  }
}

std::size_t CoeffSystem::nontrivial_count() const {
  return static_cast<std::size_t>(
      std::count_if(equations_.begin(), equations_.end(), [](const CoeffEquation& e) { return !e.poly.is_zero(); }));
}

std::map<int, int> CoeffSystem::equations_per_degree() const {
  std::map<int, int> out;
  for (const CoeffEquation& e : equations_) ++out[total_degree(e.monomial)];
  return out;
}

void CoeffSystem::evaluate(std::span<const double> u, Eigen::VectorXd& f, Eigen::MatrixXd* jacobian) const {
  const auto m = static_cast<Eigen::Index>(compiled_.size());
  f.setZero(m);
  if (jacobian) jacobian->setZero(m, static_cast<Eigen::Index>(u.size()));
  for (Eigen::Index r = 0; r < m; ++r) {
    double value = 0.0;
    for (const Term& t : compiled_[static_cast<std::size_t>(r)]) {
      double prod = t.coeff;
      for (int k = 0; k < t.count; ++k) prod *= u[t.vars[k]];
      value += prod;
      if (!jacobian) continue;
      for (int k = 0; k < t.count; ++k) {
        double d = t.coeff;
        for (int q = 0; q < t.count; ++q) {
          if (q != k) d *= u[t.vars[q]];
        }
        (*jacobian)(r, t.vars[k]) += d;
      }
    }
    f[r] = value;
  }
}

double CoeffSystem::residual_norm(std::span<const double> u) const {
  Eigen::VectorXd f;
  evaluate(u, f, nullptr);
  return f.lpNorm<Eigen::Infinity>();
}

CoeffSystem build_system(int degree) {
  Ansatz ansatz(degree);
  const SymbolicPoly3 residual = star_residual(ansatz.symbolic());
  const int max_degree = std::max(degree, 3 * (degree - 2));
  std::vector<CoeffEquation> equations;
  for (int k = 0; k <= max_degree; ++k) {
    for (const Exponent& e : monomials_of_degree(k)) equations.push_back({e, residual.coefficient(e)});
  }
  if (residual.degree() > max_degree) throw std::logic_error("residual exceeds its formal degree");
  return CoeffSystem(std::move(ansatz), std::move(equations));
}

std::optional<CubicCanonicalForm> canonicalize_cubic(const RealPoly3& cubic) {
  if (cubic.is_zero() || cubic.degree() != 3 || !cubic.is_homogeneous()) return std::nullopt;
  const std::vector<double> fc = cubic_coefficients(cubic);
  const double f_scale = max_abs(fc);

  // det Hess f must be proportional to f.
  const RealPoly3 h = det3(hessian(cubic));
  const std::vector<double> hc = cubic_coefficients(h);
  if (h.degree() > 3) return std::nullopt;
  double fh = 0.0, ff = 0.0;
  for (std::size_t i = 0; i < fc.size(); ++i) {
    fh += fc[i] * hc[i];
    ff += fc[i] * fc[i];
  }
  const double ratio = fh / ff;
  double mismatch = 0.0;
  for (std::size_t i = 0; i < fc.size(); ++i) mismatch = std::max(mismatch, std::abs(hc[i] - ratio * fc[i]));
  if (mismatch > 1e-8 * std::max(max_abs(hc), f_scale * f_scale * f_scale)) return std::nullopt;

  const auto grad = gradient(cubic);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  for (int attempt = 0; attempt < 16; ++attempt) {
    // Restrict f to a random plane through the origin, spanned by u and w.
    Vec3 u(normal(rng), normal(rng), normal(rng));
    Vec3 w(normal(rng), normal(rng), normal(rng));
    u.normalize();
    w = (w - w.dot(u) * u).normalized();
    auto f_at = [&](const Vec3& x) { return eval(cubic, {x[0], x[1], x[2]}); };
    const double g0 = f_at(u), gp = f_at(u + w), gm = f_at(u - w), g3 = f_at(w);
    const double a0 = g0, a3 = g3, a2 = 0.5 * (gp + gm) - a0, a1 = 0.5 * (gp - gm) - a3;
    if (std::abs(a3) < 1e-3 * f_scale) continue;
    Matrix3 companion = Matrix3::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(0, 2) = -a0 / a3;
    companion(1, 2) = -a1 / a3;
    companion(2, 2) = -a2 / a3;
    Eigen::EigenSolver<Matrix3> solver(companion, false);
    bool real_roots = true;
    Matrix3 forms;
    bool usable = true;
    for (int i = 0; i < 3; ++i) {
      const auto root = solver.eigenvalues()[i];
      if (std::abs(root.imag()) > 1e-6 * (1.0 + std::abs(root.real()))) {
        real_roots = false;
        break;
      }
      // On the line l_i = 0 the gradient of the product is parallel to l_i.
      const Vec3 g = eval_gradient(grad, u + root.real() * w);
      if (g.norm() < 1e-6 * f_scale) {
        usable = false;
        break;
      }
      forms.row(i) = g.normalized().transpose();
    }
    if (!real_roots) return std::nullopt;
    if (!usable) continue;
    if (std::abs(forms.determinant()) < 1e-6) return std::nullopt;

    // Canonical row order and signs: row i peaks on axis i where possible,
    // with a positive peak.
    std::array<int, 3> peak{};
    for (int i = 0; i < 3; ++i) forms.row(i).cwiseAbs().maxCoeff(&peak[i]);
    std::array<int, 3> sorted = peak;
    std::sort(sorted.begin(), sorted.end());
    if (sorted == std::array<int, 3>{0, 1, 2}) {
      Matrix3 ordered;
      for (int i = 0; i < 3; ++i) ordered.row(peak[i]) = forms.row(i);
      forms = ordered;
    }
    for (int i = 0; i < 3; ++i) {
      int at = 0;
      forms.row(i).cwiseAbs().maxCoeff(&at);
      if (forms(i, at) < 0.0) forms.row(i) *= -1.0;
    }

    const RealPoly3 product = linear_form(forms.row(0)) * linear_form(forms.row(1)) * linear_form(forms.row(2));
    const std::vector<double> pc = cubic_coefficients(product);
    double fp = 0.0, pp = 0.0;
    for (std::size_t i = 0; i < pc.size(); ++i) {
      fp += fc[i] * pc[i];
      pp += pc[i] * pc[i];
    }
    const double lambda = fp / pp;
    double fit = 0.0;
    for (std::size_t i = 0; i < pc.size(); ++i) fit = std::max(fit, std::abs(fc[i] - lambda * pc[i]));
    if (fit > 1e-6 * f_scale) return std::nullopt;
    return CubicCanonicalForm{lambda, forms, fit};
  }
  return std::nullopt;
}

SearchResult classify_solution(const CoeffSystem& system, std::vector<double> coeffs) {
  SearchResult r;
  r.residual_norm = system.residual_norm(coeffs);
  const std::size_t cubic_count = 10;
  r.higher_norm = coeffs.size() > cubic_count ? max_abs(std::span<const double>(coeffs).subspan(cubic_count)) : 0.0;
  RealPoly3 cubic;
  const auto& unknowns = system.ansatz().unknowns();
  for (std::size_t i = 0; i < cubic_count; ++i) cubic.add_term(unknowns[i], coeffs[i]);
  if (auto canon = canonicalize_cubic(cubic)) r.lambda = canon->lambda;
  if (r.higher_norm >= 1e-8) {
    r.classified_as = "higher-degree";
  } else if (r.lambda && std::abs(*r.lambda * *r.lambda - 1.0 / 3.0) < 1e-9) {
    r.classified_as = "phi0-equivalent";
  } else {
    r.classified_as = "unclassified";
  }
  r.coeffs = std::move(coeffs);
  return r;
}

SearchSummary newton_search(const CoeffSystem& system, int starts, std::uint64_t seed, const SearchOptions& options) {
  if (starts <= 0) throw std::invalid_argument("starts must be positive");
  const std::size_t n = system.ansatz().unknown_count();
  std::vector<std::optional<std::vector<double>>> outcomes(static_cast<std::size_t>(starts));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < starts; i = next++) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(i)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> dist(-options.start_box, options.start_box);
      std::vector<double> u(n);
      for (double& x : u) x = dist(rng);
      if (gauss_newton(system, u, options)) outcomes[static_cast<std::size_t>(i)] = std::move(u);
    }
  };
  const int jobs = std::max(1, std::min(options.jobs, starts));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SearchSummary summary;
  summary.starts = starts;
  summary.seed = seed;
  for (auto& o : outcomes) {
    if (!o) continue;
    const bool duplicate = std::any_of(summary.converged.begin(), summary.converged.end(), [&](const SearchResult& r) {
      double d = 0.0;
      for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(r.coeffs[k] - (*o)[k]));
      return d < options.dedup_distance;
    });
    if (!duplicate) summary.converged.push_back(classify_solution(system, std::move(*o)));
  }
  return summary;
}

HesseConeResult hesse_cone_test(const Poly3& f) {
  if (!f.is_zero() && !f.is_homogeneous()) throw std::invalid_argument("Hesse cone test needs a homogeneous polynomial");
  HesseConeResult out;
  out.is_cone = det3(hessian(f)).is_zero();
  if (!out.is_cone) return out;

  const RealPoly3 fr = to_real(f);
  const auto grad = gradient(fr);
  std::mt19937_64 rng(0xc0ffee);
  std::normal_distribution<double> normal;
  constexpr int kSamples = 16;
  Eigen::Matrix<double, kSamples, 3> rows;
  for (int i = 0; i < kSamples; ++i) {
    const Vec3 p(normal(rng), normal(rng), normal(rng));
    rows.row(i) = eval_gradient(grad, p).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, kSamples, 3>> svd(rows, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv[0];
  for (int i = 0; i < 3; ++i) {
    if (top == 0.0 || sv[i] <= 1e-8 * top) out.kernel_directions.push_back(svd.matrixV().col(i));
  }
  return out;
}

LemmaReport lemma_identity_checks(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 5);
  auto rational = [&] { return Scalar(Rational(num(rng), den(rng))); };
  // Binary form of degree k in (mu2, mu3) with random coefficients.
  auto binary_form = [&](int k) {
    Poly3 p;
    for (int a = 0; a <= k; ++a) p.add_term({0, a, k - a}, rational());
    return p;
  };
  const Poly3 x = Poly3::variable(0);

  LemmaReport report;
  for (int i = 0; i < samples; ++i) {
    const Poly3 b2 = binary_form(2);
    const Poly3 lhs = det3(hessian(x * b2));
    const Poly3 rhs = x * b2 * det2_block(hessian(b2), 1, 2) * Scalar(-2);
    ++report.quadratic_samples;
    if (!(lhs == rhs)) ++report.quadratic_failures;
  }

  const int expansion_samples = std::max(1, samples / 5);
  for (int i = 0; i < expansion_samples; ++i) {
    const PolyMat3 n2 = hessian(binary_form(2));
    const PolyMat3 n3 = hessian(binary_form(3));
    const PolyMat3 n4 = hessian(binary_form(4));
    const Poly3 x2 = x * x;
    // yz-block of Hess_yz(C4 + x C3 + x^2 C2).
    const PolyMat3 total = n4 + n3.map([&](const Poly3& e) { return x * e; }) +
                           n2.map([&](const Poly3& e) { return x2 * e; });
    const Poly3 lhs = det2_block(total, 1, 2);
    const Poly3 rhs = det2_block(n4, 1, 2) + x * polarized_det2_block(n4, n3, 1, 2) +
                      x2 * (det2_block(n3, 1, 2) + polarized_det2_block(n4, n2, 1, 2)) +
                      x2 * x * polarized_det2_block(n3, n2, 1, 2) + x2 * x2 * det2_block(n2, 1, 2);
    ++report.expansion_samples;
    if (!(lhs == rhs)) ++report.expansion_failures;
  }

  auto random_mat = [&] {
    std::array<Scalar, 9> e;
    for (auto& v : e) v = rational();
    return Mat3<Scalar>(e);
  };
  for (int i = 0; i < expansion_samples; ++i) {
    const Mat3<Scalar> n = random_mat(), m1 = random_mat(), m2 = random_mat();
    const Scalar a = rational(), b = rational();
    const Mat3<Scalar> comb = m1.map([&](const Scalar& v) { return a * v; }) + m2.map([&](const Scalar& v) { return b * v; });
    ++report.bilinear_samples;
    if (!(polarized_det(n, comb) == a * polarized_det(n, m1) + b * polarized_det(n, m2))) ++report.bilinear_failures;
  }

  const Mat3<Scalar> id = Mat3<Scalar>::diagonal(Scalar(1), Scalar(0));
  const Mat3<Scalar> zero = Mat3<Scalar>::diagonal(Scalar(0), Scalar(0));
  report.identity_pairing = polarized_det(id, id) == Scalar(3);
  report.zero_pairing = polarized_det(random_mat(), zero).is_zero();
  return report;
}

}  // namespace nktoric
