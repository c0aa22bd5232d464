#include "shintani/qseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "shintani/double_double.hpp"

namespace shintani {

namespace {

constexpr std::uint64_t kMaxTerms = std::uint64_t{1} << 48;
// Powers z·q^k are re-seeded from a higher-precision chain every kBlock
// factors, which keeps the recurrence error linear in the block length.
constexpr std::uint64_t kBlock = 8192;
constexpr int kDoubleDoubleUsableBits = 100;
constexpr long kDoubleDoubleExponentLimit = 900;

int tolerance_bits(const HPReal& abs_tol) {
  if (abs_tol.sign() <= 0 || !abs_tol.is_finite()) fail(ErrorKind::Domain, "abs_tol must be positive and finite");
  // abs_tol = m·2^e with m in [1/2, 1), so -log2(abs_tol) <= 1 - e.
  return std::max(1L, 1 - abs_tol.exponent());
}

HPComplex complex_pow(HPComplex base, std::uint64_t e, int precision) {
  base = base.with_precision(precision);
  HPComplex result(HPReal(1L, precision), HPReal(precision));
  while (e > 0) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e > 0) base *= base;
  }
  return result;
}

bool dd_representable(const HPComplex& z) {
  for (const HPReal* part : {&z.re(), &z.im()}) {
    if (part->is_zero()) continue;
    if (std::labs(part->exponent()) > kDoubleDoubleExponentLimit) return false;
  }
  return true;
}

struct Seeds {
  Seeds(const HPComplex& q, const HPComplex& z, int precision)
      : step(complex_pow(q, kBlock, precision)), current(z.with_precision(precision)) {}
  void advance() { current *= step; }
  HPComplex step;
  HPComplex current;
};

ProductResult run_mpfr(const HPComplex& q_in, const HPComplex& z_in, const ProductPlan& plan, bool track_min) {
  const int out_prec = q_in.precision();
  const int wp = std::max(plan.working_bits, kMinPrecision);
  Seeds seeds(q_in, z_in, wp + 32);
  HPComplex q = q_in.with_precision(wp);

  HPReal ar(1L, wp), ai(wp), wr(wp), wi(wp), fr(wp), fi(wp), t1(wp), t2(wp), t3(wp);
  double min_sq = std::numeric_limits<double>::infinity();

  std::uint64_t k = 0;
  while (k < plan.terms) {
    mpfr_set(wr.raw(), seeds.current.re().raw(), MPFR_RNDN);
    mpfr_set(wi.raw(), seeds.current.im().raw(), MPFR_RNDN);
    std::uint64_t end = std::min(plan.terms, k + kBlock);
    for (; k < end; ++k) {
      mpfr_ui_sub(fr.raw(), 1, wr.raw(), MPFR_RNDN);
      mpfr_neg(fi.raw(), wi.raw(), MPFR_RNDN);
      if (track_min) {
        double x = mpfr_get_d(fr.raw(), MPFR_RNDN), y = mpfr_get_d(fi.raw(), MPFR_RNDN);
        min_sq = std::min(min_sq, x * x + y * y);
      }
      // acc *= (1 - w)
      mpfr_mul(t1.raw(), ar.raw(), fr.raw(), MPFR_RNDN);
      mpfr_mul(t2.raw(), ai.raw(), fi.raw(), MPFR_RNDN);
      mpfr_mul(t3.raw(), ar.raw(), fi.raw(), MPFR_RNDN);
      mpfr_fma(ai.raw(), ai.raw(), fr.raw(), t3.raw(), MPFR_RNDN);
      mpfr_sub(ar.raw(), t1.raw(), t2.raw(), MPFR_RNDN);
      // w *= q
      mpfr_mul(t1.raw(), wr.raw(), q.re().raw(), MPFR_RNDN);
      mpfr_mul(t2.raw(), wi.raw(), q.im().raw(), MPFR_RNDN);
      mpfr_mul(t3.raw(), wr.raw(), q.im().raw(), MPFR_RNDN);
      mpfr_fma(wi.raw(), wi.raw(), q.re().raw(), t3.raw(), MPFR_RNDN);
      mpfr_sub(wr.raw(), t1.raw(), t2.raw(), MPFR_RNDN);
    }
    if (k < plan.terms) seeds.advance();
  }
  return {HPComplex(ar.with_precision(out_prec), ai.with_precision(out_prec)), plan, std::sqrt(min_sq)};
}

ProductResult run_double_double(const HPComplex& q_in, const HPComplex& z_in, const ProductPlan& plan,
                                bool track_min) {
  const int seed_prec = std::max(q_in.precision(), dd::kDoubleDoubleBits + 40);
  Seeds seeds(q_in, z_in, seed_prec);
  const dd::Complex q = dd::from_hp(q_in);
  dd::ScaledProduct acc;
  double min_sq = std::numeric_limits<double>::infinity();

  std::uint64_t k = 0;
  while (k < plan.terms) {
    dd::Complex w = dd::from_hp(seeds.current);
    std::uint64_t end = std::min(plan.terms, k + kBlock);
    for (; k < end; ++k) {
      dd::Complex f{dd::Real{1.0, 0.0} - w.re, -w.im};
      if (track_min) min_sq = std::min(min_sq, f.re.hi * f.re.hi + f.im.hi * f.im.hi);
      acc.multiply(f);
      w = w * q;
    }
    if (k < plan.terms) seeds.advance();
  }
  return {acc.to_hp(q_in.precision()), plan, std::sqrt(min_sq)};
}

}  // namespace

std::uint64_t truncation_terms(const HPReal& abs_q, const HPReal& abs_z, const HPReal& abs_tol) {
  if (abs_z.is_zero()) return 0;
  if (abs_q.is_zero()) return 1;
  const int prec = std::max(abs_q.precision(), kMinPrecision);
  HPReal one(1L, prec);
  HPReal bound = min(HPReal(0.5, prec), abs_tol.with_precision(prec) * (one - abs_q) / 4);
  if (abs_z <= bound) return 0;
  HPReal terms = (log(abs_z.with_precision(prec)) - log(bound)) / (-log(abs_q.with_precision(prec)));
  if (!terms.is_finite() || terms > HPReal(static_cast<double>(kMaxTerms), prec)) {
    fail(ErrorKind::NonConvergent, "truncation needs more than 2^48 factors");
  }
  return static_cast<std::uint64_t>(std::ceil(terms.to_double())) + 1;
}

ProductPlan plan_qpochhammer(const HPComplex& q, const HPComplex& z, const HPReal& abs_tol, ProductKernel kernel) {
  const int prec = q.precision();
  if (!q.re().is_finite() || !q.im().is_finite() || !z.re().is_finite() || !z.im().is_finite()) {
    fail(ErrorKind::NonConvergent, "non-finite q-Pochhammer argument");
  }
  HPReal abs_q = abs(q);
  HPReal limit = HPReal(1L, prec) - power_of_two(-prec / 2, prec);
  if (abs_q > limit) {
    fail(ErrorKind::QTooClose, "|q| = 1 - " + (HPReal(1L, prec) - abs_q).to_decimal(6) + " exceeds 1 - 2^-" +
                                   std::to_string(prec / 2) + "; raise the precision");
  }
  ProductPlan plan;
  plan.terms = truncation_terms(abs_q, abs(z), abs_tol);
  plan.working_bits = guarded_precision(tolerance_bits(abs_tol), plan.terms);
  switch (kernel) {
    case ProductKernel::Mpfr: plan.fast_path = false; break;
    case ProductKernel::DoubleDouble: plan.fast_path = dd_representable(q) && dd_representable(z); break;
    case ProductKernel::Auto:
      plan.fast_path = plan.working_bits <= kDoubleDoubleUsableBits && dd_representable(q) && dd_representable(z);
      break;
  }
  return plan;
}

ProductResult qpochhammer_product(const HPComplex& q, const HPComplex& z, const HPReal& abs_tol,
                                  const ProductOptions& options) {
  ProductPlan plan = plan_qpochhammer(q, z, abs_tol, options.kernel);
  const int prec = q.precision();
  if (plan.terms == 0) {
    return {HPComplex(HPReal(1L, prec), HPReal(prec)), plan, std::numeric_limits<double>::infinity()};
  }
  return plan.fast_path ? run_double_double(q, z, plan, options.track_min_factor)
                        : run_mpfr(q, z, plan, options.track_min_factor);
}

ProductResult partial_qpochhammer(const HPComplex& q, const HPComplex& z, std::uint64_t terms, const HPReal& abs_tol,
                                  const ProductOptions& options) {
  const int prec = q.precision();
  if (abs(q) > HPReal(1L, prec)) fail(ErrorKind::Domain, "finite q-product needs |q| <= 1");
  ProductPlan plan;
  plan.terms = terms;
  plan.working_bits = guarded_precision(tolerance_bits(abs_tol), std::max<std::uint64_t>(terms, 1));
  const bool representable = dd_representable(q) && dd_representable(z);
  plan.fast_path = options.kernel == ProductKernel::DoubleDouble
                       ? representable
                       : options.kernel == ProductKernel::Auto && representable &&
                             plan.working_bits <= kDoubleDoubleUsableBits;
  if (terms == 0) {
    return {HPComplex(HPReal(1L, prec), HPReal(prec)), plan, std::numeric_limits<double>::infinity()};
  }
  return plan.fast_path ? run_double_double(q, z, plan, options.track_min_factor)
                        : run_mpfr(q, z, plan, options.track_min_factor);
}

HPComplex qpochhammer(const HPComplex& q, const HPComplex& z, const HPReal& abs_tol) {
  return qpochhammer_product(q, z, abs_tol).value;
}

HPComplex qpochhammer_xy(const HPReal& x, const HPReal& y, const HPComplex& tau, const HPReal& abs_tol) {
  if (tau.im().sign() <= 0) fail(ErrorKind::Domain, "Im(tau) must be positive");
  const int prec = std::max({x.precision(), y.precision(), tau.precision()});
  HPComplex t = tau.with_precision(prec + 16);
  HPComplex q = complex_exp_2pi_i(t, prec);
  HPComplex arg = t * x.with_precision(prec + 16) + y.with_precision(prec + 16);
  HPComplex z = complex_exp_2pi_i(arg, prec);
  return qpochhammer(q, z, abs_tol);
}

HPComplex double_sine_prefactor(const HPComplex& tau, const HPComplex& z) {
  const int prec = std::max(tau.precision(), z.precision());
  const int wp = prec + 16;
  HPComplex t = tau.with_precision(wp);
  HPComplex zz = z.with_precision(wp);
  HPComplex one(HPReal(1L, wp));
  HPComplex inv_t = one / t;
  HPReal p = pi(wp);
  // exponent E with prefactor = exp(i·E)
  HPComplex e = HPComplex(p / 4) + (p / 12) * (t + inv_t) + (p / 2) * (zz * zz * inv_t - (one + inv_t) * zz);
  HPComplex i_e(-e.im(), e.re());
  return exp(i_e).with_precision(prec);
}

namespace {

// Numerator and denominator (q, z) pairs of the product formula:
// prod_{m>=0} (1 - e^{2πi(mτ + z)}) and prod_{m>=1} (1 - e^{2πi(z - m)/τ}),
// the latter as f(Q, e^{2πiz/τ}·Q) with Q = e^{-2πi/τ}.
struct SineFactors {
  HPComplex num_q, num_z, den_q, den_z;
};

SineFactors sine_factors(const HPComplex& tau, const HPComplex& z) {
  if (tau.im().sign() <= 0) fail(ErrorKind::Domain, "Im(tau) must be positive");
  const int prec = std::max(tau.precision(), z.precision());
  const int wp = prec + 16;
  HPComplex t = tau.with_precision(wp);
  HPComplex zz = z.with_precision(wp);
  HPComplex one(HPReal(1L, wp));
  HPComplex big_q = complex_exp_2pi_i(-(one / t), prec);
  return {complex_exp_2pi_i(t, prec), complex_exp_2pi_i(zz, prec), big_q, complex_exp_2pi_i(zz / t, prec) * big_q};
}

}  // namespace

std::uint64_t double_sine_tau_terms(const HPComplex& tau, const HPComplex& z, const HPReal& abs_tol) {
  SineFactors f = sine_factors(tau, z);
  return plan_qpochhammer(f.num_q, f.num_z, abs_tol / 4).terms + plan_qpochhammer(f.den_q, f.den_z, abs_tol / 4).terms;
}

DoubleSineValue double_sine_tau(const HPComplex& tau, const HPComplex& z, const HPReal& abs_tol,
                                ProductKernel kernel) {
  const int prec = std::max(tau.precision(), z.precision());
  SineFactors f = sine_factors(tau, z);
  ProductOptions options{kernel, false};
  ProductResult num = qpochhammer_product(f.num_q, f.num_z, abs_tol / 4, options);
  ProductResult den = qpochhammer_product(f.den_q, f.den_z, abs_tol / 4, options);
  HPComplex value = double_sine_prefactor(tau, z) * num.value / den.value;
  HPReal err = abs(value) * (abs_tol.with_precision(prec) / 2 + power_of_two(8 - prec, prec));
  return {value.with_precision(prec), num.plan.terms + den.plan.terms, err};
}

DoubleSineReal double_sine_real(const HPReal& omega, const HPReal& x, const HPReal& y, const HPReal& abs_tol,
                                const RealLimitOptions& options) {
  if (omega.sign() <= 0) fail(ErrorKind::Domain, "omega must be positive");
  const int prec = std::max({omega.precision(), x.precision(), y.precision()});
  // Start well inside the disc of analyticity around omega (radius ~ omega).
  int j0 = 1;
  while (power_of_two(-j0, prec) * 4 > omega) ++j0;

  HPReal level_tol = abs_tol / 8;
  ProductOptions product_options{options.kernel, true};
  std::vector<std::vector<HPReal>> table;
  std::vector<HPReal> increments;
  DoubleSineReal out{HPReal(prec), HPReal(prec), 0, 0};

  for (int level = 0; level < options.max_levels; ++level) {
    HPReal delta = power_of_two(-(j0 + level), prec);
    HPComplex tau(omega.with_precision(prec), delta);
    HPComplex z = tau * x.with_precision(prec) + y.with_precision(prec);

    SineFactors f = sine_factors(tau, z);
    ProductResult num = qpochhammer_product(f.num_q, f.num_z, level_tol / 4, product_options);
    ProductResult den = qpochhammer_product(f.den_q, f.den_z, level_tol / 4, product_options);
    if (den.min_factor < abs_tol.to_double()) {
      fail(ErrorKind::Domain, "denominator factor below tolerance at Im(tau) = 2^-" + std::to_string(j0 + level) +
                                  "; omega is too close to a rational");
    }
    out.terms += num.plan.terms + den.plan.terms;
    HPReal modulus = abs(double_sine_prefactor(tau, z) * num.value / den.value);

    // Richardson in h = delta^2; consecutive h shrink by 4.
    std::vector<HPReal> row{modulus};
    for (int m = 1; m <= level; ++m) {
      const HPReal& prev = table[level - 1][m - 1];
      HPReal factor(static_cast<double>((std::uint64_t{1} << (2 * m)) - 1), prec);
      row.push_back(row[m - 1] + (row[m - 1] - prev) / factor);
    }
    table.push_back(std::move(row));
    const HPReal& diag = table[level][level];
    out.levels = level + 1;
    if (level == 0) {
      out.value = diag;
      continue;
    }
    HPReal inc = abs(diag - table[level - 1][level - 1]);
    increments.push_back(inc);
    out.value = diag;
    out.err_est = inc;
    if (out.levels >= options.min_levels && inc <= abs_tol * max(HPReal(1L, prec), abs(diag))) return out;
    std::size_t n = increments.size();
    if (n >= 6 && !(increments[n - 1] * HPReal(1.5, prec) <= increments[n - 6])) {
      fail(ErrorKind::SlowConvergence, "Richardson increments stalled at " + inc.to_decimal(6));
    }
  }
  fail(ErrorKind::SlowConvergence,
       "no convergence within " + std::to_string(options.max_levels) + " levels; last increment " +
           out.err_est.to_decimal(6));
}

}  // namespace shintani
