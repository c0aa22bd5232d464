#pragma once

// Exact arithmetic in K = Q(sqrt d) for the length-one case d = a^2 - 4,
// where the totally positive fundamental unit is eps = (a + sqrt d)/2 with
// minus continued fraction [|a|].

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "shintani/numerics.hpp"

namespace shintani {

/// p + q·sqrt(d) with rational p, q.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(BigRational p, BigRational q, long d);

  const BigRational& p() const { return p_; }
  const BigRational& q() const { return q_; }
  long d() const { return d_; }

  /// True iff the element lies in O_K: 2p, 2q integral and 2p ≡ 2q (mod 2).
  bool is_integral() const;
  bool is_rational() const { return q_ == 0; }
  bool is_zero() const { return p_ == 0 && q_ == 0; }

  /// Coordinates (A, B) with x = A + B·omega, omega = (1 + sqrt d)/2.
  /// Requires an integral element.
  std::pair<BigInt, BigInt> integral_coordinates() const;

  FieldElement inverse() const;
  HPReal to_hp(const HPReal& sqrt_d) const;
  std::string to_string() const;

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const BigRational& s, const FieldElement& b);
  friend bool operator==(const FieldElement& a, const FieldElement& b) = default;

 private:
  BigRational p_;
  BigRational q_;
  long d_ = 0;
};

FieldElement conjugate(const FieldElement& x);

struct NormTrace {
  BigRational norm;
  BigRational trace;
};

NormTrace norm_trace(const FieldElement& x);

/// Q(sqrt d) with d = a^2 - 4 square-free, so eps = [|a|] = (a + sqrt d)/2.
class LengthOneField {
 public:
  long a() const { return a_; }
  long d() const { return d_; }
  FieldElement epsilon() const;
  FieldElement epsilon_conjugate() const;
  FieldElement omega() const;
  FieldElement element(const BigRational& p, const BigRational& q) const { return {p, q, d_}; }
  FieldElement rational(long value) const { return {BigRational(value), BigRational(0), d_}; }

 private:
  friend LengthOneField make_field(long a);
  LengthOneField(long a, long d) : a_(a), d_(d) {}
  long a_;
  long d_;
};

/// Errors: Domain (a < 3), EvenDigit, NotSquareFree.
LengthOneField make_field(long a);
/// Inverse lookup for --d: requires d + 4 to be a perfect square.
LengthOneField field_from_discriminant(long d);

bool is_square_free(long n);

/// Conductor f = (nu) for an integral non-unit nu.
class PrincipalConductor {
 public:
  const FieldElement& nu() const { return nu_; }
  /// |norm(nu)|, the index of (nu) in O_K.
  const BigInt& norm() const { return norm_; }
  bool is_rational() const { return nu_.is_rational(); }
  /// m for nu = m; throws ConductorNotRational otherwise.
  long rational_value() const;
  /// mu = 1/nu, so that <1, eps> = (mu)·f.
  FieldElement mu() const { return nu_.inverse(); }
  std::string to_string() const;

 private:
  friend PrincipalConductor make_conductor(const LengthOneField& field, const FieldElement& nu);
  PrincipalConductor(FieldElement nu, BigInt norm) : nu_(std::move(nu)), norm_(std::move(norm)) {}
  FieldElement nu_;
  BigInt norm_;
};

/// Errors: ZeroConductor, NonIntegral, UnitConductor.
PrincipalConductor make_conductor(const LengthOneField& field, const FieldElement& nu);
PrincipalConductor rational_conductor(const LengthOneField& field, long m);

/// Parses `INT`, `INT ± INT*sqrt(INT)` or `(INT ± INT*sqrt(INT))/2`
/// (whitespace-insensitive). The sqrt argument must equal `d`.
FieldElement parse_ideal_expression(std::string_view text, long d);

/// Residue class A + B·omega modulo (nu), reduced against the Hermite normal
/// form of the ideal lattice.
struct Residue {
  BigInt a;
  BigInt b;
  friend bool operator==(const Residue&, const Residue&) = default;
  std::string to_string() const;
};

class ResidueRing {
 public:
  ResidueRing(const LengthOneField& field, const PrincipalConductor& nu);

  Residue reduce(const BigInt& a, const BigInt& b) const;
  /// Throws NonIntegral for x outside O_K.
  Residue reduce(const FieldElement& x) const;
  Residue multiply(const Residue& x, const Residue& y) const;
  Residue one() const { return reduce(BigInt(1), BigInt(0)); }
  Residue pow(const Residue& x, std::uint64_t e) const;

  /// HNF basis {(alpha, 0), (beta, gamma)} in coordinates (1, omega).
  const BigInt& alpha() const { return alpha_; }
  const BigInt& beta() const { return beta_; }
  const BigInt& gamma() const { return gamma_; }
  /// |O_K / (nu)| = alpha·gamma.
  BigInt size() const { return alpha_ * gamma_; }

 private:
  long d_;
  BigInt alpha_;
  BigInt beta_;
  BigInt gamma_;
};

Residue residue_pow(const LengthOneField& field, const FieldElement& x, std::uint64_t e,
                    const PrincipalConductor& nu);

inline constexpr std::uint64_t kDefaultUnitOrderBound = 1'000'000;

/// Smallest g >= 1 with eps^g ≡ 1 (mod nu). Errors: Overflow past `bound`.
std::uint64_t unit_order(const LengthOneField& field, const PrincipalConductor& nu,
                         std::uint64_t bound = kDefaultUnitOrderBound);

/// Kronecker symbol (d/p); agrees with the Jacobi symbol for odd p.
int kronecker(long d, long p);
bool is_prime(long p);

struct GFormulaCheck {
  long p = 0;
  int symbol = 0;
  /// Set only when p is an inert prime.
  bool applicable = false;
  std::uint64_t g_computed = 0;
  long g_formula = 0;
  bool agree = false;
  std::string note;
};

/// Compares unit_order((p)) against p - (d/p) for an inert prime p.
GFormulaCheck g_formula_check(const LengthOneField& field, long p);

}  // namespace shintani
