#pragma once

// The q-Pochhammer function f(q, z) = prod_{k>=0} (1 - z q^k), its
// (x, y, tau) parameterisation f(x, y, tau) = f(e^{2πiτ}, e^{2πi(xτ+y)}),
// and the double sine function S(tau, z) through Shintani's product formula.

#include <cstdint>
#include <optional>

#include "shintani/numerics.hpp"

namespace shintani {

enum class ProductKernel {
  Auto,          // double-double when the guard-bit rule allows it, else MPFR
  Mpfr,
  DoubleDouble,  // forced; still subject to the magnitude checks
};

struct ProductPlan {
  std::uint64_t terms = 0;
  /// Bits needed by the guard rule: tolerance bits + ceil(log2 terms) + 32.
  int working_bits = 0;
  bool fast_path = false;
};

struct ProductOptions {
  ProductKernel kernel = ProductKernel::Auto;
  /// Record the smallest |1 - z q^k| seen (double accuracy).
  bool track_min_factor = false;
};

struct ProductResult {
  HPComplex value;
  ProductPlan plan;
  double min_factor = 0.0;
};

/// Smallest K with |z||q|^K <= min(1/2, abs_tol·(1 - |q|)/4); this makes the
/// neglected tail satisfy |log tail| <= abs_tol/2.
std::uint64_t truncation_terms(const HPReal& abs_q, const HPReal& abs_z, const HPReal& abs_tol);

/// Errors: QTooClose if |q| > 1 - 2^(-precision/2); NonConvergent if the
/// required truncation exceeds 2^48 factors or the inputs are not finite.
ProductPlan plan_qpochhammer(const HPComplex& q, const HPComplex& z, const HPReal& abs_tol,
                             ProductKernel kernel = ProductKernel::Auto);

ProductResult qpochhammer_product(const HPComplex& q, const HPComplex& z, const HPReal& abs_tol,
                                  const ProductOptions& options = {});

/// Finite product prod_{k<terms} (1 - z q^k) with relative rounding error at
/// most abs_tol/2 (working precision from the guard rule). Requires |q| <= 1.
ProductResult partial_qpochhammer(const HPComplex& q, const HPComplex& z, std::uint64_t terms, const HPReal& abs_tol,
                                  const ProductOptions& options = {});

/// Truncated product with relative error at most abs_tol (so in particular
/// |returned - true| <= abs_tol·(1 + |true|)). Result at q's precision.
HPComplex qpochhammer(const HPComplex& q, const HPComplex& z, const HPReal& abs_tol);

/// f(x, y, tau). Errors: Domain if Im(tau) <= 0, otherwise as qpochhammer.
HPComplex qpochhammer_xy(const HPReal& x, const HPReal& y, const HPComplex& tau, const HPReal& abs_tol);

/// i^{1/2} e^{(πi/12)(τ+1/τ)} e^{(πi/2)(z²/τ - (1+1/τ)z)} with i^{1/2} = e^{iπ/4}.
HPComplex double_sine_prefactor(const HPComplex& tau, const HPComplex& z);

struct DoubleSineValue {
  HPComplex value;
  std::uint64_t truncation_terms = 0;
  HPReal est_error;
};

/// Shintani's product representation, valid for Im(tau) > 0.
DoubleSineValue double_sine_tau(const HPComplex& tau, const HPComplex& z, const HPReal& abs_tol,
                                ProductKernel kernel = ProductKernel::Auto);

/// Factor count double_sine_tau would use, without evaluating it.
std::uint64_t double_sine_tau_terms(const HPComplex& tau, const HPComplex& z, const HPReal& abs_tol);

struct DoubleSineReal {
  HPReal value;
  HPReal err_est;
  int levels = 0;
  std::uint64_t terms = 0;
};

struct RealLimitOptions {
  int max_levels = 24;
  int min_levels = 3;
  ProductKernel kernel = ProductKernel::Auto;
};

/// S(omega, x·omega + y) for real omega > 0 as the limit of |S(tau, x·tau + y)|
/// along the vertical path tau_j = omega + i·2^-j. The sequence is an even
/// real-analytic function of Im(tau), so it is extrapolated with a full
/// Richardson table in (Im tau)^2; err_est is the last diagonal increment.
/// Errors: Domain (omega <= 0, or a denominator factor smaller than abs_tol,
/// which happens near rational omega); SlowConvergence.
DoubleSineReal double_sine_real(const HPReal& omega, const HPReal& x, const HPReal& y, const HPReal& abs_tol,
                                const RealLimitOptions& options = {});

}  // namespace shintani
