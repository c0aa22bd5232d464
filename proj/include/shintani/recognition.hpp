#pragma once

// Integer relations by PSLQ (Ferguson-Bailey) in MPFR arithmetic, and
// minimal-polynomial recognition on top of it.

#include <optional>
#include <vector>

#include "json.hpp"
#include "shintani/numerics.hpp"

namespace shintani {

struct RelationCandidate {
  /// For recognize_minpoly: ascending powers c_0 + c_1 X + ... + c_deg X^deg.
  std::vector<BigInt> coefficients;
  HPReal residual;
  int degree = 0;
  BigInt height;
  /// Only set by recognize_minpoly: a rational root was found by trial division.
  std::optional<bool> has_rational_root;
};

struct RelationOptions {
  int max_iterations = 100000;
};

/// Searches c != 0 with |sum c_i values_i| <= tol and max |c_i| <= max_height.
/// none means the PSLQ norm bound excludes such relations at this precision.
/// Errors: Domain (fewer than 2 values, non-positive height or tol),
/// InsufficientPrecision (precision < 4 log2(max_height) · length).
std::optional<RelationCandidate> integer_relation(const std::vector<HPReal>& values, const BigInt& max_height,
                                                  const HPReal& tol, const RelationOptions& options = {});

/// Lowest degree d <= max_degree for which (1, x, ..., x^d) admits a relation.
/// Errors: as integer_relation for the largest degree tried.
std::optional<RelationCandidate> recognize_minpoly(const HPReal& x, int max_degree, const BigInt& max_height,
                                                   const HPReal& tol);

/// Horner evaluation of an ascending coefficient list.
HPReal evaluate_polynomial(const std::vector<BigInt>& coefficients, const HPReal& x);

/// "X^4 - 3*X^3 + 3*X^2 - 3*X + 1"
std::string polynomial_to_string(const std::vector<BigInt>& coefficients);

nlohmann::json to_json(const RelationCandidate& candidate);

}  // namespace shintani
