#pragma once

// Unevaluated-sum double-double arithmetic (about 104 significant bits) for
// the long-product hot loops. Only IEEE add/mul/fma are used, so results are
// deterministic on any conforming platform built without fast-math.
//
// Callers select this path only when the guard-bit rule
// target + ceil(log2 N) + 32 <= kDoubleDoubleBits holds.

#include <cmath>
#include <cstdint>

#include "shintani/numerics.hpp"

namespace shintani::dd {

inline constexpr int kDoubleDoubleBits = 104;

struct Real {
  double hi = 0.0;
  double lo = 0.0;
};

inline Real two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline Real quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline Real operator+(Real a, Real b) {
  Real s = two_sum(a.hi, b.hi);
  Real t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline Real operator-(Real a) { return {-a.hi, -a.lo}; }
inline Real operator-(Real a, Real b) { return a + (-b); }

inline Real operator*(Real a, Real b) {
  double p = a.hi * b.hi;
  double e = std::fma(a.hi, b.hi, -p);
  e += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p, e);
}

inline Real operator*(Real a, double b) {
  double p = a.hi * b;
  double e = std::fma(a.hi, b, -p);
  e += a.lo * b;
  return quick_two_sum(p, e);
}

inline Real sqrt(Real a) {
  if (a.hi <= 0.0) return {0.0, 0.0};
  double x = std::sqrt(a.hi);
  // One Newton step from the double root.
  Real xx{x, 0.0};
  Real r = a - xx * xx;
  return quick_two_sum(x, r.hi / (2.0 * x));
}

inline Real from_hp(const HPReal& x) {
  double hi = x.to_double();
  HPReal rest = x.with_precision(std::max(x.precision(), 128)) - HPReal(hi, std::max(x.precision(), 128));
  return {hi, rest.to_double()};
}

inline HPReal to_hp(Real x, int precision) {
  int p = std::max(precision, 128);
  HPReal out = HPReal(x.hi, p) + HPReal(x.lo, p);
  return out.with_precision(precision);
}

struct Complex {
  Real re;
  Real im;
};

inline Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline Complex from_hp(const HPComplex& z) { return {from_hp(z.re()), from_hp(z.im())}; }

inline HPComplex to_hp(const Complex& z, int precision) { return {to_hp(z.re, precision), to_hp(z.im, precision)}; }

/// Product accumulator with a separate binary exponent so that products of
/// millions of factors cannot leave the double range.
class ScaledProduct {
 public:
  void multiply(const Complex& factor) {
    value_ = value_ * factor;
    double m = std::fmax(std::fabs(value_.re.hi), std::fabs(value_.im.hi));
    if (m > 0x1p+256 || (m < 0x1p-256 && m != 0.0)) renormalise(m);
  }

  void multiply(const Real& factor) {
    value_.re = value_.re * factor;
    value_.im = value_.im * factor;
    double m = std::fmax(std::fabs(value_.re.hi), std::fabs(value_.im.hi));
    if (m > 0x1p+256 || (m < 0x1p-256 && m != 0.0)) renormalise(m);
  }

  const Complex& mantissa() const { return value_; }
  std::int64_t exponent() const { return exponent_; }

  HPComplex to_hp(int precision) const {
    HPComplex z = dd::to_hp(value_, std::max(precision, 128));
    return HPComplex(ldexp(z.re(), exponent_), ldexp(z.im(), exponent_)).with_precision(precision);
  }

 private:
  void renormalise(double m) {
    int e = 0;
    std::frexp(m, &e);
    double s = std::ldexp(1.0, -e);
    value_.re = value_.re * s;
    value_.im = value_.im * s;
    exponent_ += e;
  }

  Complex value_{{1.0, 0.0}, {0.0, 0.0}};
  std::int64_t exponent_ = 0;
};

}  // namespace shintani::dd
