#include "doctest.h"

#include "generators.hpp"
#include "shintani/recognition.hpp"

using namespace shintani;

namespace {

std::vector<BigInt> ints(std::initializer_list<long> v) {
  std::vector<BigInt> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_CASE("rational relation") {
  const int prec = 128;
  auto r = integer_relation({HPReal(1L, prec), HPReal(0.5, prec)}, BigInt(100), power_of_two(-100, prec));
  REQUIRE(r.has_value());
  bool ok = r->coefficients == ints({1, -2}) || r->coefficients == ints({-1, 2});
  CHECK(ok);
  CHECK(r->residual.is_zero());
}

TEST_CASE("relation among 1, sqrt5 and eps") {
  const int prec = 256;
  HPReal s5 = sqrt(HPReal(5L, prec));
  auto r = integer_relation({HPReal(1L, prec), s5, (3 + s5) / 2}, BigInt(100), power_of_two(-200, prec));
  REQUIRE(r.has_value());
  // a scalar multiple of (-3, -1, 2)
  auto& c = r->coefficients;
  CHECK(c[0] * -1 == c[1] * -3);
  CHECK(c[2] * -1 == c[1] * 2);
}

TEST_CASE("no relation among transcendental-looking numbers") {
  const int prec = 256;
  HPReal p = pi(prec);
  auto r = integer_relation({HPReal(1L, prec), p, exp(HPReal(1L, prec)), log(HPReal(2L, prec))}, BigInt(50),
                            power_of_two(-200, prec));
  CHECK_FALSE(r.has_value());
}

TEST_CASE("precision requirement") {
  CHECK_THROWS_AS(integer_relation({HPReal(1L, 64), HPReal(0.5, 64), HPReal(0.25, 64)}, BigInt(1000),
                                   power_of_two(-40, 64)),
                  Error);
}

TEST_CASE("minimal polynomials") {
  const int prec = 256;
  HPReal s5 = sqrt(HPReal(5L, prec));
  auto phi = recognize_minpoly((1 + s5) / 2, 4, BigInt(100), power_of_two(-200, prec));
  REQUIRE(phi.has_value());
  CHECK(phi->coefficients == ints({-1, -1, 1}));
  CHECK(polynomial_to_string(phi->coefficients) == "X^2 - X - 1");
  CHECK(phi->has_rational_root == false);

  auto half = recognize_minpoly(HPReal(0.5, prec), 4, BigInt(100), power_of_two(-200, prec));
  REQUIRE(half.has_value());
  CHECK(half->coefficients == ints({-1, 2}));

  CHECK_FALSE(recognize_minpoly(s5, 1, BigInt(100), power_of_two(-200, prec)).has_value());
}

TEST_CASE("closed-form value gives the elimination quartic") {
  const int prec = 256;
  HPReal s5 = sqrt(HPReal(5L, prec));
  HPReal x = ((3 + s5) / 2 - sqrt((3 * s5 - 1) / 2)) / 2;
  auto r = recognize_minpoly(x, 4, BigInt(100), HPReal("1e-20", prec));
  REQUIRE(r.has_value());
  CHECK(r->coefficients == ints({1, -3, 3, -3, 1}));
  CHECK(r->residual < HPReal("1e-60", prec));
}

TEST_CASE("random quadratic irrationals are recovered") {
  gen::Source src(71);
  const int prec = 320;
  for (int i = 0; i < 30; ++i) {
    long a = src.integer(1, 9), b = src.integer(-9, 9), c = src.integer(-9, 9);
    long disc = b * b - 4 * a * c;
    if (disc <= 0) continue;
    long root = static_cast<long>(std::sqrt(static_cast<double>(disc)));
    bool square = false;
    for (long t = std::max(0L, root - 1); t <= root + 1; ++t) square = square || t * t == disc;
    if (square) continue;
    HPReal x = (-b + sqrt(HPReal(disc, prec))) / (2 * a);
    auto r = recognize_minpoly(x, 4, BigInt(100), power_of_two(-250, prec));
    REQUIRE(r.has_value());
    CHECK(r->degree == 2);
    BigInt g = gcd(gcd(BigInt(a), BigInt(b)), BigInt(c));
    CHECK(r->coefficients == std::vector<BigInt>{BigInt(c) / g, BigInt(b) / g, BigInt(a) / g});
  }
}

TEST_CASE("json view") {
  RelationCandidate c;
  c.coefficients = ints({1, -3, 3, -3, 1});
  c.degree = 4;
  c.height = 3;
  c.residual = HPReal(1e-30, 128);
  auto j = to_json(c);
  CHECK(j["polynomial"] == "X^4 - 3*X^3 + 3*X^2 - 3*X + 1");
  CHECK(j["coefficients"][1] == "-3");
}
