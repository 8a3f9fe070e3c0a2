#pragma once

// Sparse polynomials in (mu1, mu2, mu3) over a generic coefficient ring.
//
// Poly3 (exact, over Q(sqrt 3)) is the workhorse; RealPoly3 carries float
// coefficients for search results, and the coefficient-system builder
// instantiates the same template over polynomials in the unknowns.

#include "nktoric/scalar.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace nktoric {

using Exponent = std::array<int, 3>;

inline int total_degree(const Exponent& e) { return e[0] + e[1] + e[2]; }

/// Graded-lex order: lower total degree first; within a degree, higher
/// powers of mu1 (then mu2) first. mu1^2 < mu2^2 < mu3^2 < mu1*mu2*mu3.
struct GradedLex {
  bool operator()(const Exponent& l, const Exponent& r) const {
    const int dl = total_degree(l);
    const int dr = total_degree(r);
    if (dl != dr) return dl < dr;
    return l > r;
  }
};

template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<Scalar> {
  static bool is_zero(const Scalar& c) { return c.is_zero(); }
  static Scalar from_rational(const Rational& q) { return Scalar(q); }
};

template <>
struct CoeffTraits<double> {
  static bool is_zero(double c) { return c == 0.0; }
  static double from_rational(const Rational& q) { return q.get_d(); }
};

template <class C>
class BasicPoly3 {
 public:
  using Coeff = C;
  using Terms = std::map<Exponent, C, GradedLex>;

  BasicPoly3() = default;

  static BasicPoly3 constant(C c) {
    BasicPoly3 p;
    p.add_term({0, 0, 0}, std::move(c));
    return p;
  }
  static BasicPoly3 monomial(const Exponent& e, C c) {
    if (e[0] < 0 || e[1] < 0 || e[2] < 0) throw std::invalid_argument("negative exponent");
    BasicPoly3 p;
    p.add_term(e, std::move(c));
    return p;
  }
  /// The coordinate function mu_{axis+1}.
  static BasicPoly3 variable(int axis) {
    check_axis(axis);
    Exponent e{0, 0, 0};
    e[axis] = 1;
    return monomial(e, CoeffTraits<C>::from_rational(1));
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Maximum total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first); }

  /// Lowest total degree present; -1 for the zero polynomial.
  int min_degree() const { return terms_.empty() ? -1 : total_degree(terms_.begin()->first); }

  bool is_homogeneous() const { return degree() == min_degree(); }

  C coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? CoeffTraits<C>::from_rational(0) : it->second;
  }

  BasicPoly3 homogeneous_part(int k) const {
    BasicPoly3 out;
    for (const auto& [e, c] : terms_) {
      if (total_degree(e) == k) out.terms_.emplace_hint(out.terms_.end(), e, c);
    }
    return out;
  }

  /// Adds c * mu^e, dropping the entry if it cancels.
  void add_term(const Exponent& e, const C& c) {
    if (CoeffTraits<C>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (CoeffTraits<C>::is_zero(it->second)) terms_.erase(it);
    }
  }

  template <class F>
  auto map_coefficients(F&& f) const {
    using D = std::decay_t<decltype(f(std::declval<const C&>()))>;
    BasicPoly3<D> out;
    for (const auto& [e, c] : terms_) out.add_term(e, f(c));
    return out;
  }

  BasicPoly3 operator-() const {
    BasicPoly3 out(*this);
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }

  BasicPoly3& operator+=(const BasicPoly3& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  BasicPoly3& operator-=(const BasicPoly3& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  BasicPoly3& operator*=(const C& s) {
    if (CoeffTraits<C>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      it = CoeffTraits<C>::is_zero(it->second) ? terms_.erase(it) : std::next(it);
    }
    return *this;
  }

  friend BasicPoly3 operator+(BasicPoly3 l, const BasicPoly3& r) { return l += r; }
  friend BasicPoly3 operator-(BasicPoly3 l, const BasicPoly3& r) { return l -= r; }
  friend BasicPoly3 operator*(BasicPoly3 l, const C& s) { return l *= s; }
  friend BasicPoly3 operator*(const C& s, BasicPoly3 r) { return r *= s; }

  friend BasicPoly3 operator*(const BasicPoly3& l, const BasicPoly3& r) {
    BasicPoly3 out;
    for (const auto& [el, cl] : l.terms_) {
      for (const auto& [er, cr] : r.terms_) {
        out.add_term({el[0] + er[0], el[1] + er[1], el[2] + er[2]}, cl * cr);
      }
    }
    return out;
  }
  BasicPoly3& operator*=(const BasicPoly3& o) { return *this = *this * o; }

  friend bool operator==(const BasicPoly3& l, const BasicPoly3& r) { return l.terms_ == r.terms_; }

  static void check_axis(int axis) {
    if (axis < 0 || axis > 2) throw std::out_of_range("axis index must be 0, 1 or 2");
  }

 private:
  Terms terms_;
};

using Poly3 = BasicPoly3<Scalar>;
using RealPoly3 = BasicPoly3<double>;

template <class C>
BasicPoly3<C> pow(const BasicPoly3<C>& p, int n) {
  if (n < 0) throw std::invalid_argument("negative power of a polynomial");
  BasicPoly3<C> result = BasicPoly3<C>::constant(CoeffTraits<C>::from_rational(1));
  BasicPoly3<C> base = p;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n > 0) base *= base;
  }
  return result;
}

/// Partial derivative with respect to mu_{axis+1} (axis in {0,1,2}).
template <class C>
BasicPoly3<C> partial(const BasicPoly3<C>& p, int axis) {
  BasicPoly3<C>::check_axis(axis);
  BasicPoly3<C> out;
  for (const auto& [e, c] : p.terms()) {
    if (e[axis] == 0) continue;
    Exponent d = e;
    --d[axis];
    C coeff = c;
    coeff *= CoeffTraits<C>::from_rational(e[axis]);
    out.add_term(d, coeff);
  }
  return out;
}

/// Euler operator sum_i mu_i d/dmu_i: scales each degree-k part by k.
template <class C>
BasicPoly3<C> euler(const BasicPoly3<C>& p) {
  BasicPoly3<C> out;
  for (const auto& [e, c] : p.terms()) {
    const int k = total_degree(e);
    if (k == 0) continue;
    C coeff = c;
    coeff *= CoeffTraits<C>::from_rational(k);
    out.add_term(e, coeff);
  }
  return out;
}

template <class C>
std::array<BasicPoly3<C>, 3> gradient(const BasicPoly3<C>& p) {
  return {partial(p, 0), partial(p, 1), partial(p, 2)};
}

/// Evaluates p at a point of any ring V into which coefficients convert via
/// `to_value`. Powers are built incrementally per axis.
template <class C, class V, class Conv>
V evaluate_with(const BasicPoly3<C>& p, const std::array<V, 3>& point, Conv&& to_value) {
  int max_e[3] = {0, 0, 0};
  for (const auto& [e, c] : p.terms()) {
    for (int i = 0; i < 3; ++i) max_e[i] = std::max(max_e[i], e[i]);
  }
  std::array<std::vector<V>, 3> powers;
  for (int i = 0; i < 3; ++i) {
    powers[i].reserve(max_e[i] + 1);
    powers[i].push_back(V(1));
    for (int k = 1; k <= max_e[i]; ++k) powers[i].push_back(powers[i].back() * point[i]);
  }
  V sum(0);
  for (const auto& [e, c] : p.terms()) {
    sum += to_value(c) * powers[0][e[0]] * powers[1][e[1]] * powers[2][e[2]];
  }
  return sum;
}

/// Floating-point evaluation.
template <class C>
double eval(const BasicPoly3<C>& p, const std::array<double, 3>& point) {
  if constexpr (std::is_same_v<C, double>) {
    return evaluate_with(p, point, [](double c) { return c; });
  } else {
    return evaluate_with(p, point, [](const C& c) { return c.to_double(); });
  }
}

/// Exact evaluation at a point of Q(sqrt3)^3.
inline Scalar eval_exact(const Poly3& p, const std::array<Scalar, 3>& point) {
  return evaluate_with(p, point, [](const Scalar& c) { return c; });
}

/// Linear change of variables: returns q(mu) = p(T mu), T row-major.
template <class C>
BasicPoly3<C> compose_linear(const BasicPoly3<C>& p, const std::array<std::array<C, 3>, 3>& t) {
  std::array<BasicPoly3<C>, 3> forms;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Exponent e{0, 0, 0};
      e[j] = 1;
      forms[i].add_term(e, t[i][j]);
    }
  }
  BasicPoly3<C> out;
  for (const auto& [e, c] : p.terms()) {
    BasicPoly3<C> term = BasicPoly3<C>::constant(c);
    for (int i = 0; i < 3; ++i) {
      if (e[i] > 0) term *= pow(forms[i], e[i]);
    }
    out += term;
  }
  return out;
}

inline RealPoly3 to_real(const Poly3& p) {
  return p.map_coefficients([](const Scalar& c) { return c.to_double(); });
}

/// Parse error carrying the 0-based character offset of the failure.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses a polynomial expression in mu1, mu2, mu3 with the token `s` for
/// sqrt(3). Supports + - * / ^, parentheses, integers, decimals and p/q
/// rationals; division only by nonzero constants.
Poly3 parse_poly(const std::string& text);

/// Canonical text in graded-lex order, e.g. "3 + mu1^2 + (1/3)*s*mu1*mu2*mu3".
/// parse_poly(to_string(p)) == p.
std::string to_string(const Poly3& p);

/// Sign-aware text for a floating polynomial (17 significant digits).
std::string to_string(const RealPoly3& p);

/// phi0 = 3 + mu1^2 + mu2^2 + mu3^2 + (1/sqrt3) mu1 mu2 mu3.
Poly3 phi0();

}  // namespace nktoric
