#pragma once

// Sparse polynomials with rational coefficients in the unknown coefficients
// u0, u1, ... of a polynomial ansatz. Used as the coefficient ring of
// BasicPoly3 when the residual of the equation is expanded symbolically.

#include "nktoric/poly3.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace nktoric {

class CoeffPoly {
 public:
  /// Sorted variable indices with repetition, e.g. {2, 2, 5} = u2^2 u5.
  using Monomial = std::vector<int>;

  CoeffPoly() = default;
  CoeffPoly(const Rational& c);  // NOLINT: constants embed implicitly
  static CoeffPoly variable(int index);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  CoeffPoly operator-() const;
  CoeffPoly& operator+=(const CoeffPoly& o);
  CoeffPoly& operator-=(const CoeffPoly& o);
  CoeffPoly& operator*=(const CoeffPoly& o);
  friend CoeffPoly operator+(CoeffPoly l, const CoeffPoly& r) { return l += r; }
  friend CoeffPoly operator-(CoeffPoly l, const CoeffPoly& r) { return l -= r; }
  friend CoeffPoly operator*(const CoeffPoly& l, const CoeffPoly& r);
  friend bool operator==(const CoeffPoly& l, const CoeffPoly& r) { return l.terms_ == r.terms_; }

  double evaluate(std::span<const double> u) const;
  Scalar evaluate_exact(std::span<const Scalar> u) const;

  std::string str() const;

 private:
  void add(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

template <>
struct CoeffTraits<CoeffPoly> {
  static bool is_zero(const CoeffPoly& c) { return c.is_zero(); }
  static CoeffPoly from_rational(const Rational& q) { return CoeffPoly(q); }
};

using SymbolicPoly3 = BasicPoly3<CoeffPoly>;

}  // namespace nktoric
