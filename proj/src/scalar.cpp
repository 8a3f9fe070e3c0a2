#include "nktoric/scalar.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nktoric {

Rational parse_rational(const std::string& text) {
  Rational q;
  if (text.empty() || q.set_str(text, 10) != 0) {
    throw std::invalid_argument("not a rational number: '" + text + "'");
  }
  if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

int Scalar::sign() const {
  const int sa = sgn(a_);
  const int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: compare a^2 with 3 b^2.
  const int cmp_val = cmp(Rational(a_ * a_), Rational(3 * b_ * b_));
  return cmp_val > 0 ? sa : sb;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero in Q(sqrt3)");
  const Rational n = norm();
  return Scalar(Rational(a_ / n), Rational(-b_ / n));
}

double Scalar::to_double() const {
  static const double kSqrt3 = std::sqrt(3.0);
  return a_.get_d() + b_.get_d() * kSqrt3;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  Rational a = a_ * o.a_ + 3 * b_ * o.b_;
  Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

std::string Scalar::str() const {
  if (sgn(b_) == 0) return format_rational(a_);
  std::string irr;
  if (b_ == 1) {
    irr = "s";
  } else if (b_ == -1) {
    irr = "-s";
  } else {
    irr = format_rational(b_) + "*s";
  }
  if (sgn(a_) == 0) return irr;
  if (sgn(b_) < 0) return format_rational(a_) + " - " + irr.substr(1);
  return format_rational(a_) + " + " + irr;
}

std::ostream& operator<<(std::ostream& os, const Scalar& x) { return os << x.str(); }

}  // namespace nktoric
