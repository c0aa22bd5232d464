#pragma once

// Arbitrary-precision real and complex arithmetic on top of MPFR, plus the
// GMP big-integer and rational types used for all exact data.
//
// Every HPReal carries its own precision in bits. Binary operations produce a
// result at the larger of the two operand precisions and round to nearest.
// MPFR is correctly rounded for all the elementary functions used here, so
// the faithful-rounding bound 2^(2-precision) holds with room to spare, and
// results are bit-reproducible for a fixed precision and operation order.

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

#include "shintani/error.hpp"

namespace shintani {

using BigInt = mpz_class;
using BigRational = mpq_class;

inline constexpr int kMinPrecision = 64;
inline constexpr int kDefaultPrecision = 256;

/// Throws PrecisionError unless bits >= kMinPrecision.
void check_precision(int bits);

class HPReal {
 public:
  explicit HPReal(int precision = kDefaultPrecision);
  HPReal(long value, int precision);
  HPReal(double value, int precision);
  HPReal(const BigInt& value, int precision);
  /// Correctly rounded to the target precision.
  HPReal(const BigRational& value, int precision);
  /// Parses a decimal or scientific literal; correctly rounded.
  HPReal(std::string_view literal, int precision);

  HPReal(const HPReal& other);
  HPReal(HPReal&& other) noexcept;
  HPReal& operator=(const HPReal& other);
  HPReal& operator=(HPReal&& other) noexcept;
  ~HPReal();

  int precision() const { return static_cast<int>(mpfr_get_prec(value_)); }
  HPReal with_precision(int bits) const;

  mpfr_ptr raw() { return value_; }
  mpfr_srcptr raw() const { return value_; }

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  /// Binary exponent e with 0.5 <= |x| / 2^e < 1; undefined for zero.
  long exponent() const { return mpfr_get_exp(value_); }

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Scientific notation. digits == 0 selects the shortest digit count that
  /// round-trips exactly at this precision.
  std::string to_decimal(int digits = 0) const;
  /// Nearest integer (ties away from zero).
  BigInt round_to_integer() const;
  BigInt floor_to_integer() const;

  HPReal& operator+=(const HPReal& rhs);
  HPReal& operator-=(const HPReal& rhs);
  HPReal& operator*=(const HPReal& rhs);
  HPReal& operator/=(const HPReal& rhs);
  HPReal& operator*=(long rhs);
  HPReal& operator/=(long rhs);

  friend HPReal operator-(const HPReal& x);
  friend HPReal operator+(const HPReal& a, const HPReal& b);
  friend HPReal operator-(const HPReal& a, const HPReal& b);
  friend HPReal operator*(const HPReal& a, const HPReal& b);
  friend HPReal operator/(const HPReal& a, const HPReal& b);
  friend HPReal operator*(const HPReal& a, long b);
  friend HPReal operator*(long a, const HPReal& b);
  friend HPReal operator/(const HPReal& a, long b);
  friend HPReal operator+(const HPReal& a, long b);
  friend HPReal operator+(long a, const HPReal& b);
  friend HPReal operator-(const HPReal& a, long b);
  friend HPReal operator-(long a, const HPReal& b);

  friend bool operator==(const HPReal& a, const HPReal& b);
  friend std::partial_ordering operator<=>(const HPReal& a, const HPReal& b);
  friend bool identical(const HPReal& a, const HPReal& b);

 private:
  mpfr_t value_;
};

HPReal abs(const HPReal& x);
HPReal sqrt(const HPReal& x);
HPReal exp(const HPReal& x);
HPReal log(const HPReal& x);
HPReal sin(const HPReal& x);
HPReal cos(const HPReal& x);
HPReal sinh(const HPReal& x);
HPReal cosh(const HPReal& x);
HPReal atan2(const HPReal& y, const HPReal& x);
HPReal pow(const HPReal& x, long e);
HPReal ldexp(const HPReal& x, long e);
HPReal pi(int precision);
HPReal log2_value(const HPReal& x);
HPReal max(const HPReal& a, const HPReal& b);
HPReal min(const HPReal& a, const HPReal& b);

/// 2^e at the given precision.
HPReal power_of_two(long e, int precision);

enum class Elementary { Exp, Log, Sqrt, Sin, Cos, Sinh, Cosh, Atan2, Pi };

Elementary parse_elementary(std::string_view name);

/// Evaluates an elementary function by name. `Pi` takes no arguments, `Atan2`
/// takes (y, x), every other function exactly one argument.
HPReal eval_elementary(Elementary fn, std::span<const HPReal> args, int precision);
HPReal eval_elementary(std::string_view name, std::initializer_list<HPReal> args, int precision);

/// Correctly rounded conversion of an exact rational.
HPReal rational_to_hp(const BigRational& x, int precision);

class HPComplex {
 public:
  explicit HPComplex(int precision = kDefaultPrecision) : re_(precision), im_(precision) {}
  HPComplex(HPReal re, HPReal im);
  explicit HPComplex(HPReal re);

  const HPReal& re() const { return re_; }
  const HPReal& im() const { return im_; }
  HPReal& re() { return re_; }
  HPReal& im() { return im_; }
  int precision() const { return re_.precision(); }
  HPComplex with_precision(int bits) const { return {re_.with_precision(bits), im_.with_precision(bits)}; }

  HPComplex& operator+=(const HPComplex& rhs);
  HPComplex& operator-=(const HPComplex& rhs);
  HPComplex& operator*=(const HPComplex& rhs);
  HPComplex& operator/=(const HPComplex& rhs);

  friend HPComplex operator-(const HPComplex& x) { return {-x.re_, -x.im_}; }
  friend HPComplex operator+(HPComplex a, const HPComplex& b) { return a += b; }
  friend HPComplex operator-(HPComplex a, const HPComplex& b) { return a -= b; }
  friend HPComplex operator*(HPComplex a, const HPComplex& b) { return a *= b; }
  friend HPComplex operator/(HPComplex a, const HPComplex& b) { return a /= b; }
  friend HPComplex operator*(const HPComplex& a, const HPReal& s) { return {a.re_ * s, a.im_ * s}; }
  friend HPComplex operator*(const HPReal& s, const HPComplex& a) { return a * s; }
  friend HPComplex operator+(const HPComplex& a, const HPReal& s) { return {a.re_ + s, a.im_}; }
  friend HPComplex operator-(long s, const HPComplex& a) { return {s - a.re_, -a.im_}; }

 private:
  HPReal re_;
  HPReal im_;
};

HPReal abs(const HPComplex& z);
HPReal norm_squared(const HPComplex& z);
HPReal arg(const HPComplex& z);
HPComplex conj(const HPComplex& z);
HPComplex exp(const HPComplex& z);
/// e^{i·theta}
HPComplex unit_phase(const HPReal& theta);

/// e^{2πit} for real t.
HPComplex complex_exp_2pi_i(const HPReal& t, int precision);
/// e^{2πit} for complex t.
HPComplex complex_exp_2pi_i(const HPComplex& t, int precision);
/// e^{2πit} for rational t; the argument is reduced modulo 1 exactly first.
HPComplex complex_exp_2pi_i(const BigRational& t, int precision);

/// r - floor(r), exact.
BigRational fractional_part(const BigRational& r);
BigInt floor_div(const BigInt& a, const BigInt& b);

/// Bits needed for the guard rule: target + ceil(log2 factors) + 32.
int guarded_precision(int target_bits, std::uint64_t factors);

std::string to_string(const BigRational& r);

}  // namespace shintani
