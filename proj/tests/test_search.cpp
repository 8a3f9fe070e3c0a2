#include "nktoric/mat3.hpp"
#include "nktoric/nk_core.hpp"
#include "nktoric/search.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace nktoric;

namespace {

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

std::size_t unknown_index(const Ansatz& a, const Exponent& e) {
  const auto& u = a.unknowns();
  return static_cast<std::size_t>(std::find(u.begin(), u.end(), e) - u.begin());
}

std::vector<double> random_coeffs(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> u(n);
  for (double& x : u) x = d(rng);
  return u;
}

// Equation value at monomial e for coefficient vector u.
double equation_at(const CoeffSystem& s, const Exponent& e, std::span<const double> u) {
  for (const auto& eq : s.equations()) {
    if (eq.monomial == e) return eq.poly.evaluate(u);
  }
  throw std::logic_error("no such equation");
}

RealPoly3 part_of_degree(const Ansatz& a, std::span<const double> u, int k) {
  return a.assemble(u).homogeneous_part(k);
}

}  // namespace

TEST_SUITE("search") {
  TEST_CASE("system sizes") {
    CHECK(Ansatz(3).unknown_count() == 10);
    CHECK(Ansatz(4).unknown_count() == 25);
    CHECK(Ansatz(5).unknown_count() == 46);
    const CoeffSystem s3 = build_system(3);
    CHECK(s3.equation_count() == 20);
    CHECK(s3.nontrivial_count() == 19);
    CHECK(build_system(4).equation_count() == 84);
    CHECK(build_system(5).equation_count() == 220);
    const auto per = s3.equations_per_degree();
    CHECK(per.at(0) == 1);
    CHECK(per.at(3) == 10);
    CHECK_THROWS_AS(Ansatz(2), std::invalid_argument);
    CHECK_THROWS_AS(build_system(6), std::invalid_argument);
    CHECK(monomials_of_degree(2) == std::vector<Exponent>{{2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}});
  }

  TEST_CASE("the cubic solution solves the system exactly") {
    for (int d : {3, 4}) {
      const CoeffSystem s = build_system(d);
      std::vector<Scalar> u(s.ansatz().unknown_count());
      u[unknown_index(s.ansatz(), {1, 1, 1})] = Scalar(Rational(0), Rational(1, 3));
      CHECK(s.ansatz().assemble_exact(u) == phi0());
      for (const auto& eq : s.equations()) CHECK(eq.poly.evaluate_exact(u).is_zero());
    }
  }

  TEST_CASE("equations for 3 + |mu|^2 + lambda mu1 mu2 mu3") {
    const CoeffSystem s = build_system(3);
    for (double lambda : {0.0, 0.5, -1.25, kInvSqrt3}) {
      std::vector<double> u(10, 0.0);
      u[unknown_index(s.ansatz(), {1, 1, 1})] = lambda;
      const double l3 = 2.0 * lambda * lambda * lambda - (2.0 / 3.0) * lambda;
      const double l2 = 2.0 / 3.0 - 2.0 * lambda * lambda;
      CHECK(equation_at(s, {1, 1, 1}, u) == doctest::Approx(l3).epsilon(1e-14));
      for (const Exponent& e : monomials_of_degree(2)) {
        const double expected = (e[0] == 2 || e[1] == 2 || e[2] == 2) ? l2 : 0.0;
        CHECK(equation_at(s, e, u) == doctest::Approx(expected).epsilon(1e-14));
      }
      CHECK(equation_at(s, {0, 0, 0}, u) == 0.0);
    }
  }

  TEST_CASE("degree-one equations are 4 times the Laplacian of the cubic") {
    std::mt19937_64 rng(41);
    for (int d : {3, 4, 5}) {
      const CoeffSystem s = build_system(d);
      const auto u = random_coeffs(rng, s.ansatz().unknown_count());
      const RealPoly3 cubic = part_of_degree(s.ansatz(), u, 3);
      RealPoly3 lap;
      for (int i = 0; i < 3; ++i) lap += partial(partial(cubic, i), i);
      for (const Exponent& e : monomials_of_degree(1)) {
        CHECK(equation_at(s, e, u) == doctest::Approx(4.0 * lap.coefficient(e)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("top-degree equations are det Hess of the top part") {
    std::mt19937_64 rng(42);
    for (int d : {4, 5}) {
      const CoeffSystem s = build_system(d);
      const auto u = random_coeffs(rng, s.ansatz().unknown_count());
      const RealPoly3 top = det3(hessian(part_of_degree(s.ansatz(), u, d)));
      for (const Exponent& e : monomials_of_degree(3 * (d - 2))) {
        CHECK(equation_at(s, e, u) == doctest::Approx(top.coefficient(e)).epsilon(1e-12).scale(1.0));
      }
    }
  }

  TEST_CASE("evaluate matches the symbolic equations and its Jacobian") {
    const CoeffSystem s = build_system(4);
    std::mt19937_64 rng(43);
    const auto u = random_coeffs(rng, s.ansatz().unknown_count());
    Eigen::VectorXd f;
    Eigen::MatrixXd jac;
    s.evaluate(u, f, &jac);
    REQUIRE(f.size() == static_cast<Eigen::Index>(s.equation_count()));
    for (std::size_t i = 0; i < s.equation_count(); ++i) {
      CHECK(f[static_cast<Eigen::Index>(i)] == doctest::Approx(s.equations()[i].poly.evaluate(u)).epsilon(1e-12));
    }
    const double h = 1e-6;
    for (std::size_t k = 0; k < u.size(); k += 5) {
      auto up = u, um = u;
      up[k] += h;
      um[k] -= h;
      Eigen::VectorXd fp, fm;
      s.evaluate(up, fp, nullptr);
      s.evaluate(um, fm, nullptr);
      const Eigen::VectorXd fd = (fp - fm) / (2 * h);
      CHECK((fd - jac.col(static_cast<Eigen::Index>(k))).lpNorm<Eigen::Infinity>() < 1e-6);
    }
  }

  TEST_CASE("cubic canonical form") {
    RealPoly3 xyz;
    xyz.add_term({1, 1, 1}, kInvSqrt3);
    const auto a = canonicalize_cubic(xyz);
    REQUIRE(a);
    CHECK(a->lambda == doctest::Approx(kInvSqrt3).epsilon(1e-10));
    CHECK((a->transform - Matrix3::Identity()).norm() < 1e-8);

    // (x^2 - y^2) z / (2 sqrt 3) = (2 / (2 sqrt 3)) ((x - y)/sqrt2)((x + y)/sqrt2) z.
    RealPoly3 b;
    b.add_term({2, 0, 1}, 0.5 * kInvSqrt3);
    b.add_term({0, 2, 1}, -0.5 * kInvSqrt3);
    const auto cb = canonicalize_cubic(b);
    REQUIRE(cb);
    CHECK(cb->lambda * cb->lambda == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(std::abs(std::abs(cb->transform.determinant()) - 1.0) < 1e-8);

    RealPoly3 fermat;
    for (const Exponent& e : std::vector<Exponent>{{3, 0, 0}, {0, 3, 0}, {0, 0, 3}}) fermat.add_term(e, 1.0);
    CHECK_FALSE(canonicalize_cubic(fermat));
    CHECK_FALSE(canonicalize_cubic(RealPoly3()));
    RealPoly3 quad;
    quad.add_term({1, 1, 0}, 1.0);
    CHECK_FALSE(canonicalize_cubic(quad));
  }

  TEST_CASE("canonical form of random products of linear forms") {
    std::mt19937_64 rng(44);
    std::normal_distribution<double> n;
    for (int i = 0; i < 50; ++i) {
      Matrix3 l;
      for (int r = 0; r < 3; ++r) l.row(r) = Vec3(n(rng), n(rng), n(rng)).normalized().transpose();
      if (std::abs(l.determinant()) < 0.05) continue;
      const double lambda = 0.5 + std::abs(n(rng));
      RealPoly3 p = RealPoly3::constant(lambda);
      for (int r = 0; r < 3; ++r) {
        RealPoly3 form;
        for (int k = 0; k < 3; ++k) form += RealPoly3::variable(k) * l(r, k);
        p = p * form;
      }
      const auto c = canonicalize_cubic(p);
      REQUIRE(c);
      CHECK(std::abs(c->lambda) == doctest::Approx(lambda).epsilon(1e-8));
      CHECK(c->fit_residual < 1e-8);
    }
  }

  TEST_CASE("Hesse cones") {
    const Poly3 x = Poly3::variable(0), y = Poly3::variable(1), z = Poly3::variable(2);
    const HesseConeResult cube = hesse_cone_test(x * x * x);
    CHECK(cube.is_cone);
    CHECK(cube.kernel_directions.size() == 2);
    for (const Vec3& k : cube.kernel_directions) CHECK(std::abs(k[0]) < 1e-10);

    const HesseConeResult g = hesse_cone_test((x + y) * (x + y) * z + z * z * z);
    CHECK(g.is_cone);
    REQUIRE(g.kernel_directions.size() == 1);
    CHECK(std::abs(std::abs(g.kernel_directions[0].dot(Vec3(1, -1, 0).normalized())) - 1.0) < 1e-10);

    CHECK_FALSE(hesse_cone_test(x * y * z).is_cone);
    CHECK_FALSE(hesse_cone_test(x * x * x + y * y * y + z * z * z).is_cone);
    CHECK_THROWS_AS(hesse_cone_test(phi0()), std::invalid_argument);
  }

  TEST_CASE("Hesse cone kernels of random cones") {
    std::mt19937_64 rng(45);
    for (int i = 0; i < 20; ++i) {
      const Poly3 l1 = testing::random_linear_form(rng), l2 = testing::random_linear_form(rng);
      const Poly3 f = l1 * l1 * l2 + l2 * l2 * l2 * Scalar(testing::random_rational(rng)) + l1 * l1 * l1;
      const HesseConeResult r = hesse_cone_test(f);
      CHECK(r.is_cone);
      REQUIRE_FALSE(r.kernel_directions.empty());
      for (const Vec3& k : r.kernel_directions) {
        const RealPoly3 fr = to_real(f);
        std::normal_distribution<double> n;
        const Vec3 p(n(rng), n(rng), n(rng));
        const Vec3 q = p + 1.7 * k;
        const double fp = eval(fr, {p[0], p[1], p[2]}), fq = eval(fr, {q[0], q[1], q[2]});
        CHECK(std::abs(fp - fq) < 1e-8 * std::max(1.0, std::abs(fp)));
      }
    }
  }

  TEST_CASE("quadratic determinant identity by hand") {
    const Poly3 x = Poly3::variable(0), y = Poly3::variable(1), z = Poly3::variable(2);
    const Scalar k(Rational(0), Rational(1, 3));
    for (const Poly3& b : {y * z, y * y, y * z * k}) {
      const Poly3 lhs = det3(hessian(x * b));
      CHECK(lhs == x * b * det2_block(hessian(b), 1, 2) * Scalar(-2));
    }
    CHECK(det2_block(hessian(y * z), 1, 2) == Poly3::constant(Scalar(-1)));
    CHECK(det2_block(hessian(y * y), 1, 2).is_zero());
    CHECK(det2_block(hessian(y * z * k), 1, 2) == Poly3::constant(Scalar(Rational(-1, 3))));
  }

  TEST_CASE("lemma identities") {
    const LemmaReport r = lemma_identity_checks(200, 7);
    CHECK(r.ok());
    CHECK(r.quadratic_samples == 200);
    CHECK(r.expansion_samples == 40);
    CHECK(r.bilinear_samples == 40);
  }

  TEST_CASE("cubic search finds only the known solution") {
    const CoeffSystem s = build_system(3);
    const SearchSummary sum = newton_search(s, 200, 1);
    REQUIRE_FALSE(sum.converged.empty());
    for (const SearchResult& r : sum.converged) {
      CHECK(r.classified_as == "phi0-equivalent");
      REQUIRE(r.lambda);
      CHECK(std::abs(std::abs(*r.lambda) - kInvSqrt3) < 1e-9);
      CHECK(r.residual_norm < 1e-10);
      const RealPoly3 cubic = part_of_degree(s.ansatz(), r.coeffs, 3);
      // det Hess(lambda l1 l2 l3) = 2 lambda^2 det(L)^2 * cubic, with lambda^2 det(L)^2 = 1/3.
      const RealPoly3 diff = det3(hessian(cubic)) - cubic * (2.0 / 3.0);
      double m = 0.0;
      for (const Exponent& e : monomials_of_degree(3)) m = std::max(m, std::abs(diff.coefficient(e)));
      CHECK(m < 1e-9);
    }
  }

  TEST_CASE("search is deterministic across job counts") {
    const CoeffSystem s = build_system(3);
    SearchOptions one, four;
    four.jobs = 4;
    const SearchSummary a = newton_search(s, 40, 99, one), b = newton_search(s, 40, 99, four);
    REQUIRE(a.converged.size() == b.converged.size());
    for (std::size_t i = 0; i < a.converged.size(); ++i) CHECK(a.converged[i].coeffs == b.converged[i].coeffs);
    CHECK_THROWS_AS(newton_search(s, 0, 1), std::invalid_argument);
  }

  TEST_CASE("quartic search finds no point with a quartic part") {
    const CoeffSystem s = build_system(4);
    const SearchSummary sum = newton_search(s, 30, 3);
    for (const SearchResult& r : sum.converged) {
      CHECK(r.classified_as != "higher-degree");
      CHECK(r.higher_norm < 1e-8);
      const RealPoly3 top = det3(hessian(part_of_degree(s.ansatz(), r.coeffs, 4)));
      double m = 0.0;
      for (const Exponent& e : monomials_of_degree(6)) m = std::max(m, std::abs(top.coefficient(e)));
      CHECK(m < 1e-10);
    }
  }

  TEST_CASE("classification") {
    const CoeffSystem s4 = build_system(4);
    std::vector<double> u(25, 0.0);
    u[unknown_index(s4.ansatz(), {1, 1, 1})] = -kInvSqrt3;
    CHECK(classify_solution(s4, u).classified_as == "phi0-equivalent");
    u[unknown_index(s4.ansatz(), {4, 0, 0})] = 1e-3;
    CHECK(classify_solution(s4, u).classified_as == "higher-degree");
    std::vector<double> w(10, 0.0);
    w[unknown_index(Ansatz(3), {1, 1, 1})] = 0.4;
    const SearchResult r = classify_solution(build_system(3), w);
    CHECK(r.classified_as == "unclassified");
    REQUIRE(r.lambda);
    CHECK(*r.lambda == doctest::Approx(0.4).epsilon(1e-10));
  }
}
