#include "nktoric/coeff_poly.hpp"

#include <algorithm>

namespace nktoric {

CoeffPoly::CoeffPoly(const Rational& c) {
  if (sgn(c) != 0) terms_.emplace(Monomial{}, c);
}

CoeffPoly CoeffPoly::variable(int index) {
  CoeffPoly p;
  p.terms_.emplace(Monomial{index}, Rational(1));
  return p;
}

int CoeffPoly::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.size()));
  return d;
}

void CoeffPoly::add(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

CoeffPoly CoeffPoly::operator-() const {
  CoeffPoly out(*this);
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

CoeffPoly& CoeffPoly::operator+=(const CoeffPoly& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

CoeffPoly& CoeffPoly::operator-=(const CoeffPoly& o) {
  for (const auto& [m, c] : o.terms_) add(m, Rational(-c));
  return *this;
}

CoeffPoly operator*(const CoeffPoly& l, const CoeffPoly& r) {
  CoeffPoly out;
  CoeffPoly::Monomial merged;
  for (const auto& [ml, cl] : l.terms_) {
    for (const auto& [mr, cr] : r.terms_) {
      merged.clear();
      std::merge(ml.begin(), ml.end(), mr.begin(), mr.end(), std::back_inserter(merged));
      out.add(merged, Rational(cl * cr));
    }
  }
  return out;
}

CoeffPoly& CoeffPoly::operator*=(const CoeffPoly& o) { return *this = *this * o; }

double CoeffPoly::evaluate(std::span<const double> u) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = c.get_d();
    for (int v : m) term *= u[v];
    sum += term;
  }
  return sum;
}

Scalar CoeffPoly::evaluate_exact(std::span<const Scalar> u) const {
  Scalar sum;
  for (const auto& [m, c] : terms_) {
    Scalar term(c);
    for (int v : m) term *= u[v];
    sum += term;
  }
  return sum;
}

std::string CoeffPoly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    std::string t = format_rational(abs(c));
    for (int v : m) t += "*u" + std::to_string(v);
    if (out.empty()) {
      out = sgn(c) < 0 ? "-" + t : t;
    } else {
      out += (sgn(c) < 0 ? " - " : " + ") + t;
    }
  }
  return out;
}

}  // namespace nktoric
