#include "nktoric/poly3.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace nktoric {
namespace {

// Recursive-descent parser:
//   expr    := ['+'|'-'] term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := primary ['^' integer]
//   primary := number | 's' | 'mu1' | 'mu2' | 'mu3' | '(' expr ')'
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Poly3 parse() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    Poly3 p = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    return p;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  Poly3 expr() {
    Poly3 result;
    bool negate = false;
    if (accept('-')) {
      negate = true;
    } else {
      accept('+');
    }
    Poly3 t = term();
    result = negate ? -t : t;
    while (true) {
      if (accept('+')) {
        result += term();
      } else if (accept('-')) {
        result -= term();
      } else {
        break;
      }
    }
    return result;
  }

  Poly3 term() {
    Poly3 result = factor();
    while (true) {
      if (accept('*')) {
        result *= factor();
      } else if (peek('/')) {
        const std::size_t at = pos_;
        ++pos_;
        const Poly3 divisor = factor();
        if (divisor.degree() > 0) throw ParseError("division by a non-constant polynomial", at);
        if (divisor.is_zero()) throw ParseError("division by zero", at);
        result *= divisor.coefficient({0, 0, 0}).inverse();
      } else {
        break;
      }
    }
    return result;
  }

  Poly3 factor() {
    Poly3 base = primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') throw ParseError("negative exponent", at);
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    if (end == pos_) throw ParseError("expected integer exponent", at);
    if (end < text_.size() && (text_[end] == '.' || text_[end] == '/')) {
      throw ParseError("non-integer exponent", at);
    }
    int n = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + end, n);
    if (ec != std::errc() || n > 64) throw ParseError("exponent out of range", at);
    pos_ = end;
    return pow(base, n);
  }

  Poly3 primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Poly3 inner = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (text_.compare(pos_, 2, "mu") == 0) {
      const std::size_t at = pos_;
      pos_ += 2;
      if (pos_ < text_.size() && text_[pos_] >= '1' && text_[pos_] <= '3') {
        const int axis = text_[pos_] - '1';
        ++pos_;
        if (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
          throw ParseError("unknown identifier", at);
        }
        return Poly3::variable(axis);
      }
      throw ParseError("unknown identifier", at);
    }
    if (c == 's') {
      ++pos_;
      if (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        throw ParseError("unknown identifier", pos_ - 1);
      }
      return Poly3::constant(Scalar::sqrt3());
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Poly3 number() {
    const std::size_t start = pos_;
    std::string digits;
    int frac_digits = 0;
    bool seen_dot = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits.push_back(c);
        if (seen_dot) ++frac_digits;
      } else if (c == '.' && !seen_dot) {
        seen_dot = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (digits.empty()) throw ParseError("malformed number", start);
    mpz_class num(digits, 10);
    mpz_class den = 1;
    for (int i = 0; i < frac_digits; ++i) den *= 10;
    Rational q(num, den);
    q.canonicalize();
    return Poly3::constant(Scalar(q));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

std::string monomial_text(const Exponent& e) {
  std::string out;
  for (int i = 0; i < 3; ++i) {
    if (e[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += "mu" + std::to_string(i + 1);
    if (e[i] > 1) out += "^" + std::to_string(e[i]);
  }
  return out;
}

// Magnitude of a rational as a multiplicative prefix ("" for 1).
std::string rational_factor(const Rational& q) {
  if (q == 1) return "";
  if (q.get_den() == 1) return q.get_num().get_str();
  return "(" + format_rational(q) + ")";
}

std::string join_factors(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + "*" + b;
}

// Returns (is_negative, magnitude text) for the term c * mu^e.
std::pair<bool, std::string> term_text(const Scalar& c, const Exponent& e) {
  const std::string mono = monomial_text(e);
  const Rational& a = c.rational_part();
  const Rational& b = c.sqrt3_part();
  if (sgn(a) != 0 && sgn(b) != 0) {
    // Mixed coefficient: parenthesize the whole scalar.
    std::string inner = format_rational(a);
    if (sgn(b) > 0) {
      inner += " + " + join_factors(rational_factor(b), "s");
    } else {
      inner += " - " + join_factors(rational_factor(Rational(-b)), "s");
    }
    return {false, mono.empty() ? "(" + inner + ")" : "(" + inner + ")*" + mono};
  }
  if (sgn(b) == 0) {
    const bool neg = sgn(a) < 0;
    const Rational mag = abs(a);
    if (mono.empty()) return {neg, format_rational(mag)};
    return {neg, join_factors(rational_factor(mag), mono)};
  }
  const bool neg = sgn(b) < 0;
  const Rational mag = abs(b);
  return {neg, join_factors(join_factors(rational_factor(mag), "s"), mono)};
}

}  // namespace

Poly3 parse_poly(const std::string& text) { return Parser(text).parse(); }

std::string to_string(const Poly3& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    auto [neg, body] = term_text(c, e);
    if (first) {
      out += neg ? "-" + body : body;
      first = false;
    } else {
      out += neg ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

std::string to_string(const RealPoly3& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), std::abs(c), std::chars_format::general, 17);
    std::string mag(buf, res.ptr);
    const std::string mono = monomial_text(e);
    std::string body = mono.empty() ? mag : mag + "*" + mono;
    if (first) {
      out += c < 0 ? "-" + body : body;
      first = false;
    } else {
      out += c < 0 ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

Poly3 phi0() {
  Poly3 p = Poly3::constant(Scalar(3));
  for (int i = 0; i < 3; ++i) p.add_term(Exponent{i == 0 ? 2 : 0, i == 1 ? 2 : 0, i == 2 ? 2 : 0}, Scalar(1));
  p.add_term({1, 1, 1}, Scalar(Rational(0), Rational(1, 3)));
  return p;
}

}  // namespace nktoric
