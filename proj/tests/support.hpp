#pragma once

// Random generators shared by the unit and acceptance suites.

#include "nktoric/mat3.hpp"
#include "nktoric/poly3.hpp"

#include <random>

namespace nktoric::testing {

inline Rational random_rational(std::mt19937_64& rng, int max_num = 9, int max_den = 7) {
  std::uniform_int_distribution<int> num(-max_num, max_num);
  std::uniform_int_distribution<int> den(1, max_den);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline Scalar random_scalar(std::mt19937_64& rng) {
  return Scalar(random_rational(rng), random_rational(rng));
}

inline Poly3 random_homogeneous(std::mt19937_64& rng, int k, int terms = 4) {
  std::uniform_int_distribution<int> pick(0, k);
  Poly3 p;
  for (int t = 0; t < terms; ++t) {
    const int a = pick(rng);
    const int b = std::uniform_int_distribution<int>(0, k - a)(rng);
    p.add_term({a, b, k - a - b}, random_scalar(rng));
  }
  return p;
}

/// Sum of random homogeneous parts of every degree up to max_degree.
inline Poly3 random_poly(std::mt19937_64& rng, int max_degree, int terms_per_degree = 3) {
  Poly3 p;
  for (int k = 0; k <= max_degree; ++k) p += random_homogeneous(rng, k, k == 0 ? 1 : terms_per_degree);
  return p;
}

inline PolyMat3 random_poly_mat(std::mt19937_64& rng, int max_degree) {
  std::array<Poly3, 9> e;
  for (auto& p : e) p = random_poly(rng, max_degree, 2);
  return PolyMat3(e);
}

/// Linear form with small rational coefficients, as a polynomial.
inline Poly3 random_linear_form(std::mt19937_64& rng) {
  Poly3 p;
  p.add_term({1, 0, 0}, Scalar(random_rational(rng, 5, 3)));
  p.add_term({0, 1, 0}, Scalar(random_rational(rng, 5, 3)));
  p.add_term({0, 0, 1}, Scalar(random_rational(rng, 5, 3)));
  return p;
}

}  // namespace nktoric::testing
