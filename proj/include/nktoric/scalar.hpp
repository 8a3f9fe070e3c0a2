#pragma once

// Exact arithmetic in the quadratic field Q(sqrt 3).

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <string>

namespace nktoric {

using Rational = mpq_class;

/// Parses "p", "-p" or "p/q" into a canonical rational. Throws std::invalid_argument.
Rational parse_rational(const std::string& text);

/// Formats a rational as "p" or "p/q" (denominator always positive).
std::string format_rational(const Rational& q);

/// An element a + b*sqrt(3) with rational a, b.
///
/// Both parts are kept canonical (lowest terms, positive denominator), so
/// structural equality is field equality.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long value) : a_(value) {}  // NOLINT: implicit integer promotion is intended
  Scalar(Rational a) : a_(std::move(a)) { a_.canonicalize(); }  // NOLINT
  Scalar(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {
    a_.canonicalize();
    b_.canonicalize();
  }

  static Scalar sqrt3() { return Scalar(Rational(0), Rational(1)); }

  const Rational& rational_part() const { return a_; }
  const Rational& sqrt3_part() const { return b_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const { return sgn(b_) == 0; }

  /// Exact sign of a + b*sqrt(3): -1, 0 or +1.
  int sign() const;

  /// The field norm a^2 - 3 b^2; nonzero for every nonzero element.
  Rational norm() const { return a_ * a_ - 3 * b_ * b_; }

  /// Galois conjugate a - b*sqrt(3).
  Scalar conjugate() const { return Scalar(a_, -b_); }

  /// Multiplicative inverse. Throws std::domain_error for zero.
  Scalar inverse() const;

  double to_double() const;

  Scalar operator-() const { return Scalar(-a_, -b_); }
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o) { return *this *= o.inverse(); }

  friend Scalar operator+(Scalar l, const Scalar& r) { return l += r; }
  friend Scalar operator-(Scalar l, const Scalar& r) { return l -= r; }
  friend Scalar operator*(Scalar l, const Scalar& r) { return l *= r; }
  friend Scalar operator/(Scalar l, const Scalar& r) { return l /= r; }

  friend bool operator==(const Scalar& l, const Scalar& r) { return l.a_ == r.a_ && l.b_ == r.b_; }
  friend bool operator!=(const Scalar& l, const Scalar& r) { return !(l == r); }

  /// Ordering by real value.
  friend std::strong_ordering operator<=>(const Scalar& l, const Scalar& r) {
    const int s = (l - r).sign();
    return s < 0 ? std::strong_ordering::less
                 : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// Canonical text: "a", "b*s", "a + b*s", with s standing for sqrt(3).
  std::string str() const;

 private:
  Rational a_{0};
  Rational b_{0};
};

std::ostream& operator<<(std::ostream& os, const Scalar& x);

}  // namespace nktoric
