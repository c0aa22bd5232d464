#include "shintani/chebyshev_geodesic.hpp"

#include <mutex>

namespace shintani {

namespace {

// (T_n(x), T_{n+1}(x)) by binary descent on n.
std::pair<BigInt, BigInt> cheb_pair(const BigInt& x, std::uint64_t n) {
  if (n == 0) return {BigInt(2), x};
  auto [t, t1] = cheb_pair(x, n / 2);
  BigInt even = t * t - 2;       // T_2k
  BigInt odd = t * t1 - x;       // T_2k+1
  if (n % 2 == 0) return {even, odd};
  BigInt next = t1 * t1 - 2;     // T_2k+2
  return {odd, next};
}

}  // namespace

BigInt ChebyshevSeq::operator()(std::uint64_t n) const {
  {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
  }
  return pair(n).first;
}

std::pair<BigInt, BigInt> ChebyshevSeq::pair(std::uint64_t n) const {
  auto result = cheb_pair(BigInt(a_), n);
  std::unique_lock lock(mutex_);
  cache_.emplace(n, result.first);
  cache_.emplace(n + 1, result.second);
  return result;
}

BigInt cheb(long a, std::uint64_t n) { return cheb_pair(BigInt(a), n).first; }

BigInt cheb(const BigInt& x, std::uint64_t n) { return cheb_pair(x, n).first; }

bool cheb_product_check(long a, std::uint64_t n, std::uint64_t m) {
  ChebyshevSeq seq(a);
  std::uint64_t diff = n > m ? n - m : m - n;
  return seq(n) * seq(m) == seq(n + m) + seq(diff);
}

FieldConstants::FieldConstants(const LengthOneField& f, int prec)
    : field(f),
      precision(prec),
      sqrt_d(sqrt(HPReal(f.d(), prec))),
      epsilon((HPReal(f.a(), prec) + sqrt_d) / 2),
      epsilon_conjugate((HPReal(f.a(), prec) - sqrt_d) / 2) {}

GeodesicPoint tau(const FieldConstants& constants, std::uint64_t n) {
  auto [t_n, t_next] = cheb_pair(BigInt(constants.field.a()), n);
  const int prec = constants.precision;
  HPReal re(BigRational(t_next, t_n), prec);
  HPReal im = constants.sqrt_d / HPReal(t_n, prec);
  return {n, t_n, t_next, HPComplex(std::move(re), std::move(im))};
}

GeodesicPoint tau(const LengthOneField& field, std::uint64_t n, int precision) {
  return tau(FieldConstants(field, precision), n);
}

IntMatrix unit_matrix_power(long a, long k) {
  IntMatrix result{{BigInt(1), BigInt(0), BigInt(0), BigInt(1)}};
  IntMatrix base = k >= 0 ? IntMatrix{{BigInt(a), BigInt(-1), BigInt(1), BigInt(0)}}
                          : IntMatrix{{BigInt(0), BigInt(1), BigInt(-1), BigInt(a)}};
  auto mul = [](const IntMatrix& x, const IntMatrix& y) {
    return IntMatrix{{x.m[0] * y.m[0] + x.m[1] * y.m[2], x.m[0] * y.m[1] + x.m[1] * y.m[3],
                      x.m[2] * y.m[0] + x.m[3] * y.m[2], x.m[2] * y.m[1] + x.m[3] * y.m[3]}};
  };
  unsigned long e = k >= 0 ? static_cast<unsigned long>(k) : static_cast<unsigned long>(-k);
  while (e > 0) {
    if (e & 1UL) result = mul(result, base);
    base = mul(base, base);
    e >>= 1U;
  }
  return result;
}

HPComplex moebius_U(const LengthOneField& field, long k, const HPComplex& tau) {
  if (k == 0) return tau;
  IntMatrix u = unit_matrix_power(field.a(), k);
  const int prec = tau.precision();
  auto hp = [prec](const BigInt& v) { return HPReal(v, prec); };
  HPComplex num = HPComplex(tau.re() * hp(u.m[0]) + hp(u.m[1]), tau.im() * hp(u.m[0]));
  HPComplex den = HPComplex(tau.re() * hp(u.m[2]) + hp(u.m[3]), tau.im() * hp(u.m[2]));
  if (norm_squared(den).is_zero()) fail(ErrorKind::SingularPoint, "Moebius denominator vanishes");
  return num / den;
}

}  // namespace shintani
