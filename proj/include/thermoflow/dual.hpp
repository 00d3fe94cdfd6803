#ifndef THERMOFLOW_DUAL_HPP
#define THERMOFLOW_DUAL_HPP

#include <array>
#include <cmath>

#include "thermoflow/props.hpp"

namespace thermoflow {

/// Forward-mode value with N partial derivatives. Used for the cell-local
/// (N = 3: p, T, S_o) and facet-local (N = 6: both cells) chain rules of the
/// Jacobian assembly.
template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit constant

  static Dual variable(double value, int slot) {
    Dual x(value);
    x.d[slot] = 1.0;
    return x;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(double s) {
    v *= s;
    for (auto& x : d) x *= s;
    return *this;
  }
};

template <int N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N>
Dual<N> operator-(Dual<N> a) {
  a *= -1.0;
  return a;
}
template <int N>
Dual<N> operator*(Dual<N> a, double s) { return a *= s; }
template <int N>
Dual<N> operator*(double s, Dual<N> a) { return a *= s; }
template <int N>
Dual<N> operator/(Dual<N> a, double s) { return a *= 1.0 / s; }

template <int N>
Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.v * b.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

template <int N>
Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.v / b.v);
  const double inv2 = 1.0 / (b.v * b.v);
  for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
  return r;
}

/// Embeds a 3-slot cell quantity into slots [offset, offset + 3) of a wider dual.
template <int M>
Dual<M> lift(const Dual<3>& x, int offset) {
  Dual<M> r(x.v);
  for (int i = 0; i < 3; ++i) r.d[offset + i] = x.d[i];
  return r;
}

/// A property of (p, T) as a cell dual over (p, T, S_o).
inline Dual<3> from_prop(const PropEval& e) {
  Dual<3> r(e.value);
  r.d[0] = e.d_dp;
  r.d[1] = e.d_dT;
  return r;
}

}  // namespace thermoflow

#endif
