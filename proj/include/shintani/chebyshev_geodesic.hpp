#pragma once

// Normalised Chebyshev values T_n(a) = eps^n + eps^-n (exact big integers)
// and the discretised modular geodesic tau_n = (T_{n+1}(a) + i·sqrt d)/T_n(a)
// joining eps' and eps in the upper half plane.

#include <array>
#include <cstdint>
#include <map>
#include <shared_mutex>

#include "shintani/numerics.hpp"
#include "shintani/quadratic_field.hpp"

namespace shintani {

/// Thread-safe cache of T_n(a). Large indices are reached by doubling:
/// T_2n = T_n^2 - 2 and T_{2n+1} = T_n·T_{n+1} - a.
class ChebyshevSeq {
 public:
  explicit ChebyshevSeq(long a) : a_(a) {}

  long a() const { return a_; }
  BigInt operator()(std::uint64_t n) const;

 private:
  std::pair<BigInt, BigInt> pair(std::uint64_t n) const;

  long a_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::uint64_t, BigInt> cache_;
};

BigInt cheb(long a, std::uint64_t n);
/// Same, for a big-integer argument (used for T_j(b) with b = T_2g(a)).
BigInt cheb(const BigInt& x, std::uint64_t n);

/// Checks T_n·T_m = T_{n+m} + T_{|n-m|} exactly.
bool cheb_product_check(long a, std::uint64_t n, std::uint64_t m);

/// Field constants at one precision, computed once and shared.
struct FieldConstants {
  FieldConstants(const LengthOneField& field, int precision);

  LengthOneField field;
  int precision;
  HPReal sqrt_d;
  HPReal epsilon;
  HPReal epsilon_conjugate;
};

struct GeodesicPoint {
  std::uint64_t n = 0;
  BigInt t_n;     // T_n(a)
  BigInt t_next;  // T_{n+1}(a)
  HPComplex tau;
};

GeodesicPoint tau(const FieldConstants& constants, std::uint64_t n);
GeodesicPoint tau(const LengthOneField& field, std::uint64_t n, int precision);

/// Integer 2x2 matrix acting by Möbius transformation.
struct IntMatrix {
  std::array<BigInt, 4> m;  // [[m0, m1], [m2, m3]]
};

/// U^k for U = [[a, -1], [1, 0]]; negative k gives powers of U^-1 = [[0, 1], [-1, a]].
IntMatrix unit_matrix_power(long a, long k);

/// U^k · tau. Errors: SingularPoint if the denominator vanishes.
HPComplex moebius_U(const LengthOneField& field, long k, const HPComplex& tau);

}  // namespace shintani
