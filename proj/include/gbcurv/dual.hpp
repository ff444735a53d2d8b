#pragma once

// Forward-mode dual numbers with N tangent directions. Nesting
// Dual<Dual<double, N>, N> yields exact second derivatives: seed coordinate k
// in both levels and read d2f/dx_k dx_l from eps[k].eps[l].

#include <array>
#include <cmath>

namespace gbcurv {

template <typename T, int N>
struct Dual {
  T re{};
  std::array<T, N> eps{};

  Dual() = default;
  Dual(double v) : re(v) {}  // NOLINT: implicit lift of constants
  Dual(const T& v, const std::array<T, N>& e) : re(v), eps(e) {}
};

namespace detail {
template <typename T>
struct IsDual : std::false_type {};
template <typename T, int N>
struct IsDual<Dual<T, N>> : std::true_type {};
}  // namespace detail

/// Underlying double value of a (possibly nested) dual number.
inline double base_value(double x) { return x; }
template <typename T, int N>
double base_value(const Dual<T, N>& x) {
  return base_value(x.re);
}

template <typename T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.re = -a.re;
  for (int i = 0; i < N; ++i) r.eps[i] = -a.eps[i];
  return r;
}

template <typename T, int N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.re = a.re + b.re;
  for (int i = 0; i < N; ++i) r.eps[i] = a.eps[i] + b.eps[i];
  return r;
}

template <typename T, int N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.re = a.re - b.re;
  for (int i = 0; i < N; ++i) r.eps[i] = a.eps[i] - b.eps[i];
  return r;
}

template <typename T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.re = a.re * b.re;
  for (int i = 0; i < N; ++i) r.eps[i] = a.re * b.eps[i] + a.eps[i] * b.re;
  return r;
}

template <typename T, int N>
Dual<T, N> operator*(double s, const Dual<T, N>& a) {
  Dual<T, N> r;
  r.re = s * a.re;
  for (int i = 0; i < N; ++i) r.eps[i] = s * a.eps[i];
  return r;
}

template <typename T, int N>
Dual<T, N> operator*(const Dual<T, N>& a, double s) {
  return s * a;
}

template <typename T, int N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
  const T inv = T(1.0) / b.re;
  Dual<T, N> r;
  r.re = a.re * inv;
  for (int i = 0; i < N; ++i) r.eps[i] = (a.eps[i] - r.re * b.eps[i]) * inv;
  return r;
}

// Chain rule helper: f(a) given f(a.re) and f'(a.re).
template <typename T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& f, const T& df) {
  Dual<T, N> r;
  r.re = f;
  for (int i = 0; i < N; ++i) r.eps[i] = df * a.eps[i];
  return r;
}

template <typename T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return chain(a, T(sin(a.re)), T(cos(a.re)));
}

template <typename T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return chain(a, T(cos(a.re)), T(-sin(a.re)));
}

template <typename T, int N>
Dual<T, N> sinh(const Dual<T, N>& a) {
  using std::cosh;
  using std::sinh;
  return chain(a, T(sinh(a.re)), T(cosh(a.re)));
}

template <typename T, int N>
Dual<T, N> cosh(const Dual<T, N>& a) {
  using std::cosh;
  using std::sinh;
  return chain(a, T(cosh(a.re)), T(sinh(a.re)));
}

template <typename T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using std::exp;
  const T e = exp(a.re);
  return chain(a, e, e);
}

template <typename T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  const T s = sqrt(a.re);
  return chain(a, s, T(0.5) / s);
}

}  // namespace gbcurv
