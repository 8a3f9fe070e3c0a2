#pragma once

// 3x3 matrices over a commutative ring: Hessians, cofactor determinants,
// adjugates and the polarized determinant.

#include "nktoric/poly3.hpp"

#include <array>

namespace nktoric {

template <class T>
class Mat3 {
 public:
  Mat3() = default;
  explicit Mat3(const std::array<T, 9>& entries) : m_(entries) {}

  static Mat3 diagonal(const T& d, const T& zero) {
    Mat3 out;
    out.m_.fill(zero);
    for (int i = 0; i < 3; ++i) out(i, i) = d;
    return out;
  }

  T& operator()(int i, int j) { return m_[3 * i + j]; }
  const T& operator()(int i, int j) const { return m_[3 * i + j]; }

  bool is_symmetric() const {
    return (*this)(0, 1) == (*this)(1, 0) && (*this)(0, 2) == (*this)(2, 0) && (*this)(1, 2) == (*this)(2, 1);
  }

  Mat3& operator+=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) m_[k] += o.m_[k];
    return *this;
  }
  Mat3& operator-=(const Mat3& o) {
    for (int k = 0; k < 9; ++k) m_[k] -= o.m_[k];
    return *this;
  }
  friend Mat3 operator+(Mat3 l, const Mat3& r) { return l += r; }
  friend Mat3 operator-(Mat3 l, const Mat3& r) { return l -= r; }

  friend Mat3 operator*(const Mat3& l, const Mat3& r) {
    Mat3 out;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        T acc = l(i, 0) * r(0, j);
        acc += l(i, 1) * r(1, j);
        acc += l(i, 2) * r(2, j);
        out(i, j) = std::move(acc);
      }
    }
    return out;
  }

  template <class F>
  auto map(F&& f) const {
    using D = std::decay_t<decltype(f(std::declval<const T&>()))>;
    std::array<D, 9> e;
    for (int k = 0; k < 9; ++k) e[k] = f(m_[k]);
    return Mat3<D>(e);
  }

  friend bool operator==(const Mat3& l, const Mat3& r) { return l.m_ == r.m_; }

 private:
  std::array<T, 9> m_{};
};

using PolyMat3 = Mat3<Poly3>;

/// Symmetric matrix of second partials.
template <class C>
Mat3<BasicPoly3<C>> hessian(const BasicPoly3<C>& p) {
  Mat3<BasicPoly3<C>> h;
  const auto g = gradient(p);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      h(i, j) = partial(g[i], j);
      if (j != i) h(j, i) = h(i, j);
    }
  }
  return h;
}

/// Determinant by cofactor expansion along the first row.
template <class T>
T det3(const Mat3<T>& m) {
  T c0 = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  T c1 = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  T c2 = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  return m(0, 0) * c0 + m(0, 1) * c1 + m(0, 2) * c2;
}

/// Adjugate (transposed cofactor matrix): m * adj3(m) = det3(m) * I.
template <class T>
Mat3<T> adj3(const Mat3<T>& m) {
  Mat3<T> a;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      // Cyclic index choice carries the cofactor sign.
      a(i, j) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    }
  }
  return a;
}

/// Coefficient of t in det(N + t M), computed as trace(adj(N) M).
template <class T>
T polarized_det(const Mat3<T>& n, const Mat3<T>& m) {
  const Mat3<T> a = adj3(n);
  T acc = a(0, 0) * m(0, 0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == 0 && j == 0) continue;
      acc += a(i, j) * m(j, i);
    }
  }
  return acc;
}

/// 2x2 determinant of the block of rows/cols {i0, i1}.
template <class T>
T det2_block(const Mat3<T>& m, int i0, int i1) {
  return m(i0, i0) * m(i1, i1) - m(i0, i1) * m(i1, i0);
}

/// Coefficient of t in det(N + t M) for the 2x2 block {i0, i1}.
template <class T>
T polarized_det2_block(const Mat3<T>& n, const Mat3<T>& m, int i0, int i1) {
  return n(i0, i0) * m(i1, i1) + m(i0, i0) * n(i1, i1) - n(i0, i1) * m(i1, i0) - m(i0, i1) * n(i1, i0);
}

}  // namespace nktoric
