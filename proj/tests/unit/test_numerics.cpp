#include "doctest.h"

#include <string>

#include "generators.hpp"
#include "shintani/numerics.hpp"

using namespace shintani;

namespace {

// Newton on x^2 = v, independent of mpfr_sqrt
HPReal newton_sqrt(long v, int precision) {
  HPReal x(2L, precision);
  for (int i = 0; i < 20; ++i) x = (x + HPReal(v, precision) / x) / 2;
  return x;
}

// decimal expansion of p/q by schoolbook long division
std::string long_division(long p, long q, int digits) {
  std::string out = std::to_string(p / q) + ".";
  long r = p % q;
  for (int i = 0; i < digits; ++i) {
    r *= 10;
    out += static_cast<char>('0' + r / q);
    r %= q;
  }
  return out;
}

bool close(const HPReal& a, const HPReal& b, long bits) { return abs(a - b) <= power_of_two(-bits, a.precision()); }

}  // namespace

TEST_CASE("elementary functions at trivial points") {
  CHECK(eval_elementary("sin", {HPReal(0L, 128)}, 128).is_zero());
  CHECK(eval_elementary("exp", {HPReal(0L, 128)}, 128) == HPReal(1L, 128));
  HPReal p = eval_elementary("pi", {}, 128);
  CHECK(close(eval_elementary("atan2", {HPReal(1L, 128), HPReal(1L, 128)}, 128) * 4, p, 126));
}

TEST_CASE("sqrt(5) matches a Newton iteration") {
  HPReal s = eval_elementary("sqrt", {HPReal(5L, 128)}, 128);
  CHECK(close(s, newton_sqrt(5, 128), 126));
  CHECK(s.to_decimal(17).rfind("2.2360679774997897", 0) == 0);
}

TEST_CASE("elementary dispatch rejects bad input") {
  CHECK_THROWS_AS(parse_elementary("tan"), Error);
  CHECK_THROWS_AS(eval_elementary("exp", {}, 128), Error);
  CHECK_THROWS_AS(eval_elementary("log", {HPReal(1L, 128)}, 32), Error);
  CHECK_THROWS_AS(eval_elementary("log", {HPReal(-1L, 128)}, 128), Error);
}

TEST_CASE("complex_exp_2pi_i") {
  const int prec = 192;
  HPComplex one = complex_exp_2pi_i(HPReal(0L, prec), prec);
  CHECK(one.re() == HPReal(1L, prec));
  CHECK(one.im().is_zero());

  HPComplex half = complex_exp_2pi_i(BigRational(1, 2), prec);
  CHECK(half.re() == HPReal(-1L, prec));
  CHECK(abs(half.im()) <= power_of_two(-prec + 2, prec));

  HPComplex vertical = complex_exp_2pi_i(HPComplex(HPReal(0L, prec), HPReal(1L, prec)), prec);
  HPReal expected = eval_elementary("exp", {-2 * pi(prec)}, prec);
  CHECK(close(vertical.re(), expected, prec - 4));
  CHECK(abs(vertical.im()) <= power_of_two(-prec, prec));
  CHECK(vertical.re().to_decimal(6).rfind("1.86744", 0) == 0);
}

TEST_CASE("rational phases reduce exactly") {
  gen::Source src(11);
  for (int i = 0; i < 50; ++i) {
    BigRational t = src.rational(-50, 50, 97);
    HPComplex a = complex_exp_2pi_i(t, 128);
    HPComplex b = complex_exp_2pi_i(fractional_part(t), 128);
    CHECK(identical(a.re(), b.re()));
    CHECK(identical(a.im(), b.im()));
  }
}

TEST_CASE("rational_to_hp rounding") {
  CHECK(rational_to_hp(BigRational(1, 4), 64).to_double() == 0.25);
  HPReal third = rational_to_hp(BigRational(1, 3), 64);
  // the nearest 64-bit value differs from 1/3 by less than half an ulp
  HPReal err = abs(HPReal(BigRational(1, 3), 256) - third.with_precision(256));
  CHECK(err <= power_of_two(-66, 256));
  HPReal seven = rational_to_hp(BigRational(7, 11), 200);
  HPReal oracle(long_division(7, 11, 70), 200);
  CHECK(close(seven, oracle, 190));
}

TEST_CASE("decimal round trip") {
  gen::Source src(12);
  for (int i = 0; i < 100; ++i) {
    int prec = static_cast<int>(src.integer(64, 400));
    HPReal x = src.real(-1e6, 1e6, prec);
    HPReal back(x.to_decimal(), prec);
    CHECK(identical(x, back));
  }
  CHECK(HPReal(0L, 64).to_decimal() == "0");
}

TEST_CASE("precision floor") {
  CHECK_NOTHROW(check_precision(64));
  CHECK_THROWS_AS(check_precision(63), Error);
  CHECK(guarded_precision(64, 1) == 96);
  CHECK(guarded_precision(64, 1000) == 64 + 10 + 32);
}

TEST_CASE("arithmetic property: (a+b)^2 = a^2 + 2ab + b^2 to rounding") {
  gen::Source src(13);
  for (int i = 0; i < 100; ++i) {
    HPReal a = src.real(-10, 10, 256);
    HPReal b = src.real(-10, 10, 256);
    HPReal lhs = (a + b) * (a + b);
    HPReal rhs = a * a + 2 * a * b + b * b;
    CHECK(abs(lhs - rhs) <= power_of_two(20 - 256, 256) * 400);
  }
}
