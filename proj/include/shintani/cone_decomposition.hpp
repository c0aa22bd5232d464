#pragma once

// Shintani's cone decomposition for the unit ray class modulo a principal
// conductor, via the minus continued fraction step map
//   (x, y) -> (<a·x + y>, 1 - x).

#include <string>
#include <vector>

#include "json.hpp"

#include "shintani/numerics.hpp"
#include "shintani/quadratic_field.hpp"

namespace shintani {

/// <r>: the representative of r mod 1 in (0, 1].
BigRational angle_fraction(const BigRational& r);
/// {r}: the representative of r mod 1 in [0, 1).
BigRational brace_fraction(const BigRational& r);

struct ConePair {
  BigRational x;
  BigRational y;
  friend bool operator==(const ConePair&, const ConePair&) = default;
};

struct ConeDatum {
  /// Index in 1..g; the anchor (initial pair) carries k = g.
  std::uint64_t k = 0;
  BigRational x;
  BigRational y;
  ConePair pair() const { return {x, y}; }
};

/// Writes mu = 1/nu = X·eps + Y and returns (<X>, {Y}).
ConePair initial_pair(const LengthOneField& field, const PrincipalConductor& nu);

/// (x, y) -> (<a·x + y>, 1 - x).
ConePair step(const ConePair& pair, long a);

struct DecompositionDatum {
  LengthOneField field;
  PrincipalConductor conductor;
  std::uint64_t g = 0;
  /// Step order starting at the initial pair; data[i] carries k = i for
  /// i >= 1 and data[0] carries k = g.
  std::vector<ConeDatum> data;

  /// The pair with index k modulo g (k = 0 and k = g give the anchor).
  const ConeDatum& at(std::uint64_t k) const { return data[k % g]; }
};

/// Errors: PeriodMismatch if g steps do not return to the initial pair or
/// the orbit repeats early.
DecompositionDatum decomposition(const LengthOneField& field, const PrincipalConductor& nu);

/// z_k = x_k·eps + y_k.
HPReal z_of(const ConeDatum& entry, const LengthOneField& field, int precision);

/// Checks x_k eps^(1-k) + y_k eps^(-k) - mu ∈ O_K exactly.
bool satisfies_membership(const DecompositionDatum& datum, const ConeDatum& entry);

/// {a, d, nu, g, pairs: [[x_num, x_den, y_num, y_den], ...]}
nlohmann::json decomposition_to_json(const DecompositionDatum& datum);

}  // namespace shintani
