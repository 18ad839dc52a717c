#ifndef LAGMECH_DUAL_HPP
#define LAGMECH_DUAL_HPP

#include <cmath>

namespace lagmech {

// Forward-mode dual number. Nest (Dual<Dual<double>>) for second
// derivatives of chart maps.
template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative

  Dual() = default;
  Dual(T value) : v(value) {}  // NOLINT: implicit promotion of constants
  Dual(T value, T deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
};

inline double scalar_part(double x) { return x; }
template <class T>
double scalar_part(const Dual<T>& x) { return scalar_part(x.v); }

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;
using std::tan;

template <class T>
Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <class T>
Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -sin(a.v) * a.d}; }
template <class T>
Dual<T> tan(const Dual<T>& a) {
  T c = cos(a.v);
  return {tan(a.v), a.d / (c * c)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (s + s)};
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T den = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / den};
}

// a^p for constant exponent p (power rule; valid for a <= 0 with integral p).
inline double pow_const(double a, double p) { return std::pow(a, p); }
template <class T>
Dual<T> pow_const(const Dual<T>& a, double p) {
  if (p == 0.0) return {pow_const(a.v, 0.0), T{} * a.d};
  return {pow_const(a.v, p), pow_const(a.v, p - 1.0) * T(p) * a.d};
}

// a^b for general b (requires a > 0).
template <class T>
Dual<T> pow(const Dual<T>& a, const Dual<T>& b) { return exp(b * log(a)); }

}  // namespace lagmech

#endif
