#include "shintani/invariants.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <limits>

#include "shintani/double_double.hpp"

namespace shintani {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_budget(std::uint64_t factors, const EvalOptions& options, const std::string& what) {
  if (factors > options.factor_budget) {
    fail(ErrorKind::BudgetExceeded, what + " needs " + std::to_string(factors) + " factors, budget is " +
                                        std::to_string(options.factor_budget) +
                                        " (raise it with SHINTANI_FACTOR_BUDGET)");
  }
}

HPReal tolerance(const EvalOptions& options) {
  check_precision(options.precision);
  if (options.tail() < 8) fail(ErrorKind::Config, "tail bits must be at least 8");
  return power_of_two(-options.tail(), options.precision);
}

struct GeodesicIndex {
  BigInt t;     // T_n
  BigInt next;  // T_{n+1}
};

GeodesicIndex geodesic_index(long a, std::uint64_t n) { return {cheb(a, n), cheb(a, n + 1)}; }

// r·e^{2πi·phase} with an exact rational phase.
HPComplex polar(const BigRational& phase, const HPReal& modulus, int prec) {
  return complex_exp_2pi_i(phase, prec) * modulus.with_precision(prec);
}

// e^{2πi τ_n}: phase T_{n+1}/T_n, modulus e^{-2π sqrt(d)/T_n}.
HPComplex geodesic_q(const FieldConstants& c, const GeodesicIndex& idx, int prec) {
  HPReal two_pi = 2 * pi(prec + 16);
  HPReal modulus = exp(-two_pi * c.sqrt_d / HPReal(idx.t, prec + 16));
  return polar(BigRational(idx.next, idx.t), modulus, prec);
}

// e^{2πi(x τ_n + y)}.
HPComplex geodesic_z(const FieldConstants& c, const GeodesicIndex& idx, const BigRational& x, const BigRational& y,
                     int prec) {
  HPReal two_pi = 2 * pi(prec + 16);
  HPReal modulus = exp(-two_pi * HPReal(x, prec + 16) * c.sqrt_d / HPReal(idx.t, prec + 16));
  BigRational phase = x * BigRational(idx.next, idx.t) + y;
  phase.canonicalize();
  return polar(phase, modulus, prec);
}

InvariantEstimate base_estimate(Method method, const LengthOneField& field, const PrincipalConductor& nu,
                                std::uint64_t g, const EvalOptions& options) {
  InvariantEstimate e;
  e.method = method;
  e.a = field.a();
  e.d = field.d();
  e.nu = nu.to_string();
  if (nu.is_rational()) e.m = nu.rational_value();
  e.g = g;
  e.precision = options.precision;
  e.value = HPReal(options.precision);
  e.err_est = HPReal(options.precision);
  return e;
}

// ------------------------------------------------------------- expression 1

struct Expr1Setup {
  DecompositionDatum datum;
  ConeDatum anchor;
  HPComplex q_num, z_num, q_den, z_den;
};

Expr1Setup expr1_setup(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t n,
                       const EvalOptions& options) {
  DecompositionDatum datum = decomposition(field, nu);
  if (options.anchor >= datum.g) {
    fail(ErrorKind::Config, "anchor " + std::to_string(options.anchor) + " must be below g = " +
                                std::to_string(datum.g));
  }
  ConeDatum anchor = datum.data[options.anchor];
  const int prec = options.precision;
  FieldConstants c(field, prec + 32);
  GeodesicIndex lo = geodesic_index(field.a(), n);
  GeodesicIndex hi = geodesic_index(field.a(), n + 2 * datum.g);
  return {datum,
          anchor,
          geodesic_q(c, lo, prec),
          geodesic_z(c, lo, anchor.x, anchor.y, prec),
          geodesic_q(c, hi, prec),
          geodesic_z(c, hi, anchor.x, anchor.y, prec)};
}

// ------------------------------------------------------------- expression 2

// Smallest K >= 1 with q~^K/(1 - q~) · 1/(1 - |q_n|) <= tol/4, which bounds
// the neglected layers of prod_k prod_r (1 - w q~^k q_n^r).
std::uint64_t layer_count(const HPReal& q_tilde, const HPReal& abs_qn, const HPReal& tol) {
  HPReal one(1L, q_tilde.precision());
  HPReal bound = q_tilde / (one - q_tilde) / (one - abs_qn);
  HPReal target = tol / 4;
  std::uint64_t k = 1;
  while (bound > target) {
    bound *= q_tilde;
    if (++k > 100000) fail(ErrorKind::NonConvergent, "layer count diverges");
  }
  return k;
}

struct Expr2Side {
  HPComplex qn;
  HPReal abs_qn;
  GeodesicIndex idx;
};

Expr2Side expr2_side(const FieldConstants& c, std::uint64_t n, int prec) {
  GeodesicIndex idx = geodesic_index(c.field.a(), n);
  HPComplex q = geodesic_q(c, idx, prec);
  HPReal aq = abs(q);
  return {std::move(q), std::move(aq), std::move(idx)};
}

struct LayerProduct {
  HPComplex value;
  std::uint64_t factors = 0;
};

LayerProduct expr2_layers(const Expr2Side& side, const HPComplex& zeta, const HPReal& q_tilde, std::uint64_t layers,
                          Expr2Mode mode, const HPReal& tol, ProductKernel kernel, bool evaluate) {
  const int prec = q_tilde.precision();
  const std::uint64_t t = side.idx.t.get_ui();
  LayerProduct out{HPComplex(HPReal(1L, prec), HPReal(prec)), 0};
  HPReal layer_tol = tol / HPReal(static_cast<long>(2 * layers), prec);
  ProductOptions options{kernel, false};
  // literal mode: Q = zeta·q_n and factors 1 - q~^k Q^r, r = 0..T_n, minus the
  // vanishing (k, r) = (0, 0) one.
  HPComplex big_q = zeta * side.qn;
  HPReal scale(1L, prec);
  for (std::uint64_t k = 0; k < layers; ++k, scale *= q_tilde) {
    HPComplex z(prec);
    std::uint64_t terms = 0;
    if (mode == Expr2Mode::Derived) {
      z = zeta * scale;
      terms = t;
    } else if (k == 0) {
      z = big_q;
      terms = t;
    } else {
      z = HPComplex(scale);
      terms = t + 1;
    }
    out.factors += terms;
    if (!evaluate) continue;
    out.value *= partial_qpochhammer(mode == Expr2Mode::Derived ? side.qn : big_q, z, terms, layer_tol, options).value;
  }
  return out;
}

struct Expr2Plan {
  long m;
  DecompositionDatum datum;
  FieldConstants constants;
  HPReal q_tilde;
  HPComplex zeta;
  Expr2Side num, den;
  std::uint64_t layers;
};

Expr2Plan expr2_plan(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t n,
                     const EvalOptions& options) {
  long m = nu.rational_value();
  DecompositionDatum datum = decomposition(field, nu);
  const int prec = options.precision;
  FieldConstants c(field, prec + 32);
  HPReal q_tilde = exp(-2 * pi(prec + 16) * c.sqrt_d).with_precision(prec);
  HPComplex zeta = complex_exp_2pi_i(BigRational(1, m), prec);
  Expr2Side num = expr2_side(c, n, prec);
  Expr2Side den = expr2_side(c, n + 2 * datum.g, prec);
  if (!den.idx.t.fits_ulong_p()) fail(ErrorKind::BudgetExceeded, "T_n exceeds the machine word");
  std::uint64_t layers = layer_count(q_tilde, num.abs_qn, tolerance(options));
  return {m, std::move(datum), std::move(c), std::move(q_tilde), std::move(zeta), std::move(num), std::move(den),
          layers};
}

// ------------------------------------------------------------- expression 3

struct Expr3Plan {
  long m;
  std::uint64_t g;
  std::uint64_t big_n, big_n2;  // N = 2gj, N' = 2g(j+1)
  GeodesicIndex num, den;
  std::uint64_t layers;
};

Expr3Plan expr3_plan(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t j,
                     const EvalOptions& options) {
  long m = nu.rational_value();
  std::uint64_t g = unit_order(field, nu);
  // b = T_2g(a); T_j(b) = T_2gj(a)
  BigInt b = cheb(field.a(), 2 * g);
  auto index = [&](std::uint64_t jj) {
    return GeodesicIndex{cheb(b, jj), cheb(field.a(), 2 * g * jj + 1)};
  };
  GeodesicIndex num = index(j);
  GeodesicIndex den = index(j + 1);
  if (!den.t.fits_ulong_p()) fail(ErrorKind::BudgetExceeded, "T_N exceeds the machine word");

  const int prec = options.precision;
  HPReal sqrt_d = sqrt(HPReal(field.d(), prec + 16));
  HPReal two_pi_sqrt_d = 2 * pi(prec + 16) * sqrt_d;
  HPReal q_tilde = exp(-two_pi_sqrt_d);
  HPReal abs_qn = exp(-two_pi_sqrt_d / HPReal(num.t, prec + 16));
  std::uint64_t needed = layer_count(q_tilde, abs_qn, tolerance(options));
  std::uint64_t layers = needed;
  if (options.k_max) {
    if (*options.k_max < needed) {
      fail(ErrorKind::TailTooLarge, "k_max = " + std::to_string(*options.k_max) + " leaves a tail above 2^-" +
                                        std::to_string(options.tail()) + "; at least " + std::to_string(needed) +
                                        " layers are needed");
    }
    layers = *options.k_max;
  }
  return {m, g, 2 * g * j, 2 * g * (j + 1), std::move(num), std::move(den), layers};
}

// Per block of the real-form loop: the rotation e^{iπu_r}, (sinh, cosh)(x_r)
// and e^{-2x_r} at the block start, with x_r = π sqrt(d)(r/T + k).
struct RealSeeds {
  HPComplex rotation;
  HPReal sinh_x, cosh_x, decay;
};

RealSeeds real_seeds(const GeodesicIndex& idx, long m, const HPReal& pi_sqrt_d, std::uint64_t r, std::uint64_t k,
                     int prec) {
  BigRational u = BigRational(BigInt(r) * idx.next, idx.t) + BigRational(1, m);
  u.canonicalize();
  BigRational half_u = u / 2;
  half_u.canonicalize();
  HPReal x = pi_sqrt_d * (HPReal(BigRational(BigInt(r), idx.t), prec) + HPReal(static_cast<long>(k), prec));
  return {complex_exp_2pi_i(half_u, prec), sinh(x), cosh(x), exp(-2 * x)};
}

constexpr std::uint64_t kRealBlock = 8192;

// prod over k < layers, r < T of 4e^{-2x}(sin^2(πu) + sinh^2(x)) = |1 - w|^2.
HPReal real_form_product(const GeodesicIndex& idx, long m, const HPReal& sqrt_d, std::uint64_t layers,
                         const HPReal& tol, ProductKernel kernel) {
  const int prec = tol.precision();
  const std::uint64_t t = idx.t.get_ui();
  const std::uint64_t total = t * layers;
  const int tol_bits = std::max(1L, 1 - tol.exponent());
  const int wp = guarded_precision(tol_bits, total);
  const int seed_prec = std::max(wp, dd::kDoubleDoubleBits) + 40;
  HPReal pi_sqrt_d = pi(seed_prec) * sqrt_d.with_precision(seed_prec);
  HPReal h = pi_sqrt_d / HPReal(idx.t, seed_prec);
  BigRational half_alpha(idx.next, 2 * idx.t);
  half_alpha.canonicalize();
  HPComplex rot = complex_exp_2pi_i(half_alpha, seed_prec);
  HPReal ch = cosh(h), sh = sinh(h), e2h = exp(-2 * h);

  // sinh stays below 2^600 in double range
  const bool dd_range = (pi_sqrt_d * HPReal(static_cast<long>(layers + 1), seed_prec)).to_double() < 600.0;
  const bool fast = kernel == ProductKernel::DoubleDouble ? dd_range
                    : kernel == ProductKernel::Auto       ? dd_range && wp <= 100
                                                          : false;
  if (fast) {
    dd::ScaledProduct acc;
    const dd::Complex rd = dd::from_hp(rot);
    const dd::Real chd = dd::from_hp(ch), shd = dd::from_hp(sh), e2d = dd::from_hp(e2h);
    for (std::uint64_t k = 0; k < layers; ++k) {
      for (std::uint64_t r0 = 0; r0 < t; r0 += kRealBlock) {
        RealSeeds s = real_seeds(idx, m, pi_sqrt_d, r0, k, seed_prec);
        dd::Complex c = dd::from_hp(s.rotation);
        dd::Real sx = dd::from_hp(s.sinh_x), cx = dd::from_hp(s.cosh_x), dec = dd::from_hp(s.decay);
        const std::uint64_t end = std::min(t, r0 + kRealBlock);
        for (std::uint64_t r = r0; r < end; ++r) {
          dd::Real f = (c.im * c.im + sx * sx) * dec * 4.0;
          acc.multiply(f);
          c = c * rd;
          dd::Real nsx = sx * chd + cx * shd;
          cx = cx * chd + sx * shd;
          sx = nsx;
          dec = dec * e2d;
        }
      }
    }
    return acc.to_hp(prec).re();
  }

  HPReal acc(1L, wp);
  HPReal rr = rot.re().with_precision(wp), ri = rot.im().with_precision(wp);
  HPReal chw = ch.with_precision(wp), shw = sh.with_precision(wp), e2w = e2h.with_precision(wp);
  HPReal f(wp), t1(wp), t2(wp);
  for (std::uint64_t k = 0; k < layers; ++k) {
    for (std::uint64_t r0 = 0; r0 < t; r0 += kRealBlock) {
      RealSeeds s = real_seeds(idx, m, pi_sqrt_d, r0, k, seed_prec);
      HPReal cr = s.rotation.re().with_precision(wp), ci = s.rotation.im().with_precision(wp);
      HPReal sx = s.sinh_x.with_precision(wp), cx = s.cosh_x.with_precision(wp), dec = s.decay.with_precision(wp);
      const std::uint64_t end = std::min(t, r0 + kRealBlock);
      for (std::uint64_t r = r0; r < end; ++r) {
        mpfr_sqr(f.raw(), ci.raw(), MPFR_RNDN);
        mpfr_fma(f.raw(), sx.raw(), sx.raw(), f.raw(), MPFR_RNDN);
        mpfr_mul(f.raw(), f.raw(), dec.raw(), MPFR_RNDN);
        mpfr_mul_2ui(f.raw(), f.raw(), 2, MPFR_RNDN);
        mpfr_mul(acc.raw(), acc.raw(), f.raw(), MPFR_RNDN);
        // rotation
        mpfr_mul(t1.raw(), cr.raw(), rr.raw(), MPFR_RNDN);
        mpfr_mul(t2.raw(), ci.raw(), ri.raw(), MPFR_RNDN);
        mpfr_mul(ci.raw(), ci.raw(), rr.raw(), MPFR_RNDN);
        mpfr_fma(ci.raw(), cr.raw(), ri.raw(), ci.raw(), MPFR_RNDN);
        mpfr_sub(cr.raw(), t1.raw(), t2.raw(), MPFR_RNDN);
        // hyperbolic step
        mpfr_mul(t1.raw(), sx.raw(), chw.raw(), MPFR_RNDN);
        mpfr_fma(t1.raw(), cx.raw(), shw.raw(), t1.raw(), MPFR_RNDN);
        mpfr_mul(t2.raw(), cx.raw(), chw.raw(), MPFR_RNDN);
        mpfr_fma(cx.raw(), sx.raw(), shw.raw(), t2.raw(), MPFR_RNDN);
        mpfr_swap(sx.raw(), t1.raw());
        mpfr_mul(dec.raw(), dec.raw(), e2w.raw(), MPFR_RNDN);
      }
    }
  }
  return acc.with_precision(prec);
}

// ------------------------------------------------------------- double sine

struct DoubleSineSetup {
  DecompositionDatum datum;
  std::vector<HPComplex> taus, zs;  // k = 1..g
};

DoubleSineSetup double_sine_setup(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t n,
                                  const EvalOptions& options) {
  DecompositionDatum datum = decomposition(field, nu);
  const int prec = options.precision;
  FieldConstants c(field, prec + 32);
  DoubleSineSetup s{datum, {}, {}};
  for (std::uint64_t k = 1; k <= datum.g; ++k) {
    const ConeDatum& pair = datum.data[k % datum.g];
    HPComplex t = tau(c, n + 2 * (datum.g - k)).tau;
    HPComplex z = t * HPReal(pair.x, prec + 32) + HPReal(pair.y, prec + 32);
    s.taus.push_back(t.with_precision(prec));
    s.zs.push_back(z.with_precision(prec));
  }
  return s;
}

// ------------------------------------------------------------- generic

InvariantEstimate generic_product(Method method, const LengthOneField& field, const PrincipalConductor& nu,
                                  const EvalOptions& options, bool conjugate_side) {
  auto start = Clock::now();
  DecompositionDatum datum = decomposition(field, nu);
  const int prec = options.precision;
  check_precision(prec);
  FieldConstants c(field, prec + 16);
  HPReal omega = conjugate_side ? c.epsilon_conjugate : c.epsilon;
  HPReal abs_tol = power_of_two(-prec / 2, prec + 16);
  RealLimitOptions real_options;
  real_options.kernel = options.kernel;

  InvariantEstimate e = base_estimate(method, field, nu, datum.g, options);
  HPReal value(1L, prec + 16), relative(prec + 16);
  for (const ConeDatum& pair : datum.data) {
    DoubleSineReal s =
        double_sine_real(omega, HPReal(pair.x, prec + 16), HPReal(pair.y, prec + 16), abs_tol, real_options);
    value *= s.value;
    relative += s.err_est / s.value;
    e.factors += s.terms;
  }
  e.value = value.with_precision(prec);
  e.err_est = (value * relative).with_precision(prec);
  e.wall_ms = elapsed_ms(start);
  return e;
}

}  // namespace

// ------------------------------------------------------------- names

std::string to_string(Method method) {
  switch (method) {
    case Method::Expr1Limit: return "Expr1Limit";
    case Method::Expr2SingleQ: return "Expr2SingleQ";
    case Method::Expr3Real: return "Expr3Real";
    case Method::DoubleSineProd: return "DoubleSineProd";
    case Method::X1Generic: return "X1Generic";
    case Method::X2Generic: return "X2Generic";
    case Method::XProduct: return "XProduct";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  static const std::pair<std::string_view, Method> names[] = {
      {"expr1", Method::Expr1Limit},     {"Expr1Limit", Method::Expr1Limit},
      {"expr2", Method::Expr2SingleQ},   {"Expr2SingleQ", Method::Expr2SingleQ},
      {"expr3", Method::Expr3Real},      {"Expr3Real", Method::Expr3Real},
      {"dsine", Method::DoubleSineProd}, {"DoubleSineProd", Method::DoubleSineProd},
      {"x1", Method::X1Generic},         {"X1Generic", Method::X1Generic},
      {"x2", Method::X2Generic},         {"X2Generic", Method::X2Generic},
      {"x", Method::XProduct},           {"XProduct", Method::XProduct},
  };
  for (const auto& [key, method] : names) {
    if (key == name) return method;
  }
  fail(ErrorKind::Config, "unknown method '" + std::string(name) + "'");
}

bool is_geodesic(Method method) {
  return method == Method::Expr1Limit || method == Method::Expr2SingleQ || method == Method::Expr3Real ||
         method == Method::DoubleSineProd;
}

std::string to_string(Expr2Mode mode) { return mode == Expr2Mode::Derived ? "derived" : "paper_literal"; }

Expr2Mode parse_expr2_mode(std::string_view name) {
  if (name == "derived") return Expr2Mode::Derived;
  if (name == "paper_literal") return Expr2Mode::PaperLiteral;
  fail(ErrorKind::Config, "unknown mode '" + std::string(name) + "' (derived | paper_literal)");
}

std::uint64_t default_factor_budget() {
  constexpr std::uint64_t kDefault = 10'000'000;
  const char* env = std::getenv("SHINTANI_FACTOR_BUDGET");
  if (env == nullptr || *env == '\0') return kDefault;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) fail(ErrorKind::Config, "SHINTANI_FACTOR_BUDGET must be a positive integer");
  return v;
}

// ------------------------------------------------------------- records

nlohmann::json to_json(const InvariantEstimate& e) {
  nlohmann::json j = {
      {"method", to_string(e.method)},
      {"a", e.a},
      {"d", e.d},
      {"nu", e.nu},
      {"g", e.g},
      {"n", e.n},
      {"precision_bits", e.precision},
      {"value_dec", e.value.to_decimal()},
      {"err_est_dec", e.err_est.to_decimal()},
      {"factors", e.factors},
      {"wall_ms", e.wall_ms},
  };
  if (e.m) j["m"] = *e.m;
  if (e.j) j["j"] = *e.j;
  if (e.mode) j["mode"] = *e.mode;
  if (e.note) j["note"] = *e.note;
  return j;
}

InvariantEstimate estimate_from_json(const nlohmann::json& record) {
  try {
    InvariantEstimate e;
    e.method = parse_method(record.at("method").get<std::string>());
    e.a = record.at("a").get<long>();
    e.d = record.at("d").get<long>();
    e.nu = record.at("nu").get<std::string>();
    e.g = record.at("g").get<std::uint64_t>();
    e.n = record.at("n").get<std::uint64_t>();
    e.precision = record.at("precision_bits").get<int>();
    e.value = HPReal(record.at("value_dec").get<std::string>(), e.precision);
    e.err_est = HPReal(record.at("err_est_dec").get<std::string>(), e.precision);
    e.factors = record.value("factors", std::uint64_t{0});
    e.wall_ms = record.at("wall_ms").get<double>();
    if (record.contains("m")) e.m = record["m"].get<long>();
    if (record.contains("j")) e.j = record["j"].get<std::uint64_t>();
    if (record.contains("mode")) e.mode = record["mode"].get<std::string>();
    if (record.contains("note")) e.note = record["note"].get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::Parse, std::string("invariant record: ") + ex.what());
  }
}

// ------------------------------------------------------------- planning

std::uint64_t planned_factors(const LengthOneField& field, const PrincipalConductor& nu, Method method,
                              std::uint64_t n, const EvalOptions& options) {
  const HPReal tol = tolerance(options);
  switch (method) {
    case Method::Expr1Limit: {
      Expr1Setup s = expr1_setup(field, nu, n, options);
      return plan_qpochhammer(s.q_num, s.z_num, tol, options.kernel).terms +
             plan_qpochhammer(s.q_den, s.z_den, tol, options.kernel).terms;
    }
    case Method::Expr2SingleQ: {
      Expr2Plan p = expr2_plan(field, nu, n, options);
      return p.layers * (p.num.idx.t.get_ui() + p.den.idx.t.get_ui() + 2);
    }
    case Method::Expr3Real: {
      Expr3Plan p = expr3_plan(field, nu, n, options);
      return p.layers * (p.num.t.get_ui() + p.den.t.get_ui());
    }
    case Method::DoubleSineProd: {
      DoubleSineSetup s = double_sine_setup(field, nu, n, options);
      std::uint64_t total = 0;
      HPReal part = tol / HPReal(static_cast<long>(2 * s.datum.g), options.precision);
      for (std::size_t i = 0; i < s.taus.size(); ++i) total += double_sine_tau_terms(s.taus[i], s.zs[i], part);
      return total;
    }
    default: fail(ErrorKind::Config, to_string(method) + " is not indexed by the geodesic");
  }
}

// ------------------------------------------------------------- estimates

InvariantEstimate x1_expr1(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t n,
                           const EvalOptions& options) {
  auto start = Clock::now();
  const HPReal tol = tolerance(options);
  Expr1Setup s = expr1_setup(field, nu, n, options);
  ProductPlan pn = plan_qpochhammer(s.q_num, s.z_num, tol, options.kernel);
  ProductPlan pd = plan_qpochhammer(s.q_den, s.z_den, tol, options.kernel);
  check_budget(pn.terms + pd.terms, options, "expression 1 at n = " + std::to_string(n));

  ProductOptions po{options.kernel, false};
  HPComplex num = qpochhammer_product(s.q_num, s.z_num, tol, po).value;
  HPComplex den = qpochhammer_product(s.q_den, s.z_den, tol, po).value;

  InvariantEstimate e = base_estimate(Method::Expr1Limit, field, nu, s.datum.g, options);
  e.n = n;
  e.value = abs(num) / abs(den);
  e.err_est = 2 * tol * e.value;
  e.factors = pn.terms + pd.terms;
  if (options.anchor != 0) e.note = "anchor l = " + std::to_string(options.anchor);
  e.wall_ms = elapsed_ms(start);
  return e;
}

InvariantEstimate x1_double_sine(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t n,
                                 const EvalOptions& options) {
  auto start = Clock::now();
  const HPReal tol = tolerance(options);
  DoubleSineSetup s = double_sine_setup(field, nu, n, options);
  HPReal part = tol / HPReal(static_cast<long>(2 * s.datum.g), options.precision);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < s.taus.size(); ++i) total += double_sine_tau_terms(s.taus[i], s.zs[i], part);
  check_budget(total, options, "double-sine product at n = " + std::to_string(n));

  HPComplex product(HPReal(1L, options.precision), HPReal(options.precision));
  for (std::size_t i = 0; i < s.taus.size(); ++i) {
    product *= double_sine_tau(s.taus[i], s.zs[i], part, options.kernel).value;
  }
  InvariantEstimate e = base_estimate(Method::DoubleSineProd, field, nu, s.datum.g, options);
  e.n = n;
  e.value = abs(product);
  e.err_est = tol * e.value;
  e.factors = total;
  e.wall_ms = elapsed_ms(start);
  return e;
}

InvariantEstimate x1_expr2(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t n,
                           const EvalOptions& options) {
  auto start = Clock::now();
  const HPReal tol = tolerance(options);
  Expr2Plan p = expr2_plan(field, nu, n, options);
  auto side = [&](const Expr2Side& sd, bool evaluate) {
    return expr2_layers(sd, p.zeta, p.q_tilde, p.layers, options.mode, tol, options.kernel, evaluate);
  };
  std::uint64_t total = side(p.num, false).factors + side(p.den, false).factors;
  check_budget(total, options, "expression 2 at n = " + std::to_string(n));

  LayerProduct num = side(p.num, true);
  LayerProduct den = side(p.den, true);
  InvariantEstimate e = base_estimate(Method::Expr2SingleQ, field, nu, p.datum.g, options);
  e.n = n;
  e.value = abs(num.value) / abs(den.value);
  e.err_est = 2 * tol * e.value;
  e.factors = total;
  e.mode = to_string(options.mode);
  if (options.mode == Expr2Mode::PaperLiteral) {
    e.note = "factor r=0 of the k=0 layer is 1 - 1 = 0 on both sides and was dropped";
  }
  e.wall_ms = elapsed_ms(start);
  return e;
}

InvariantEstimate x1_expr3(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t j,
                           const EvalOptions& options) {
  auto start = Clock::now();
  const HPReal tol = tolerance(options);
  Expr3Plan p = expr3_plan(field, nu, j, options);
  std::uint64_t total = p.layers * (p.num.t.get_ui() + p.den.t.get_ui());
  check_budget(total, options, "expression 3 at j = " + std::to_string(j));

  const int prec = options.precision;
  HPReal sqrt_d = sqrt(HPReal(field.d(), prec + 16));
  HPReal num = real_form_product(p.num, p.m, sqrt_d, p.layers, tol, options.kernel);
  HPReal den = real_form_product(p.den, p.m, sqrt_d, p.layers, tol, options.kernel);

  InvariantEstimate e = base_estimate(Method::Expr3Real, field, nu, p.g, options);
  e.n = p.big_n;
  e.j = j;
  e.value = sqrt(num / den);
  e.err_est = 2 * tol * e.value;
  e.factors = total;
  e.note = "N = " + std::to_string(p.big_n) + ", N' = " + std::to_string(p.big_n2) + ", layers = " +
           std::to_string(p.layers);
  e.wall_ms = elapsed_ms(start);
  return e;
}

InvariantEstimate x1_generic(const LengthOneField& field, const PrincipalConductor& nu, const EvalOptions& options) {
  return generic_product(Method::X1Generic, field, nu, options, false);
}

InvariantEstimate x2_generic(const LengthOneField& field, const PrincipalConductor& nu, const EvalOptions& options) {
  return generic_product(Method::X2Generic, field, nu, options, true);
}

InvariantEstimate x_product(const InvariantEstimate& x1, const InvariantEstimate& x2) {
  InvariantEstimate e = x1;
  e.method = Method::XProduct;
  e.value = x1.value * x2.value;
  e.err_est = x1.err_est * x2.value + x2.err_est * x1.value;
  e.factors = x1.factors + x2.factors;
  e.wall_ms = x1.wall_ms + x2.wall_ms;
  return e;
}

InvariantEstimate estimate(const LengthOneField& field, const PrincipalConductor& nu, Method method,
                           std::uint64_t n, const EvalOptions& options) {
  switch (method) {
    case Method::Expr1Limit: return x1_expr1(field, nu, n, options);
    case Method::Expr2SingleQ: return x1_expr2(field, nu, n, options);
    case Method::Expr3Real: return x1_expr3(field, nu, n, options);
    case Method::DoubleSineProd: return x1_double_sine(field, nu, n, options);
    default: fail(ErrorKind::Config, to_string(method) + " is not indexed by the geodesic");
  }
}

// ------------------------------------------------------------- convergence

Extrapolation extrapolate(const std::vector<HPReal>& h, const std::vector<HPReal>& values) {
  if (h.size() != values.size() || values.size() < 2) {
    fail(ErrorKind::Config, "extrapolation needs at least two samples");
  }
  const std::size_t n = values.size();
  std::vector<std::vector<HPReal>> table{values};
  for (std::size_t m = 1; m < n; ++m) {
    std::vector<HPReal> col;
    const auto& prev = table[m - 1];
    for (std::size_t i = 0; i + m < n; ++i) {
      col.push_back((h[i] * prev[i + 1] - h[i + m] * prev[i]) / (h[i] - h[i + m]));
    }
    table.push_back(std::move(col));
  }
  std::optional<Extrapolation> best;
  for (std::size_t m = 0; m < n; ++m) {
    const auto& col = table[m];
    if (col.size() < 2) break;
    const HPReal& last = col.back();
    HPReal err = abs(last - col[col.size() - 2]);
    // also compare with the last entry of the previous order
    if (m > 0) err = max(err, abs(last - table[m - 1].back()));
    if (!best || err < best->err_est) best = Extrapolation{last, err, m};
  }
  return *best;
}

bool ConvergenceTable::deltas_decrease() const {
  std::optional<HPReal> prev;
  for (const ConvergenceRow& row : rows) {
    if (!row.delta) continue;
    HPReal d = abs(*row.delta);
    if (prev && !(d < *prev)) return false;
    prev = d;
  }
  return true;
}

ConvergenceTable converge(const LengthOneField& field, const PrincipalConductor& nu, Method method,
                          const std::vector<std::uint64_t>& n_list, const EvalOptions& options) {
  if (!is_geodesic(method)) fail(ErrorKind::Config, to_string(method) + " has no n-sequence to converge");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) fail(ErrorKind::Config, "n list must be strictly ascending");
  }
  ConvergenceTable table;
  table.method = method;
  std::vector<HPReal> h, values;
  const int prec = options.precision;
  for (std::uint64_t n : n_list) {
    ConvergenceRow row;
    row.n = n;
    row.estimate = estimate(field, nu, method, n, options);
    HPReal hn = HPReal(1L, prec) / HPReal(cheb(field.a(), row.estimate.n), prec);
    if (!table.rows.empty()) {
      const ConvergenceRow& prev = table.rows.back();
      row.delta = row.estimate.value - prev.estimate.value;
      const HPReal& hp = h.back();
      row.richardson = (hp * row.estimate.value - hn * prev.estimate.value) / (hp - hn);
      row.estimate.err_est = max(row.estimate.err_est, abs(*row.delta));
    }
    h.push_back(hn);
    values.push_back(row.estimate.value);
    table.rows.push_back(std::move(row));
  }
  if (values.size() >= 2) table.limit = extrapolate(h, values);
  return table;
}

std::vector<std::uint64_t> indices_within_budget(const LengthOneField& field, const PrincipalConductor& nu,
                                                 Method method, std::uint64_t first, std::uint64_t last,
                                                 const EvalOptions& options) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = first; n <= last; ++n) {
    std::uint64_t factors = 0;
    try {
      factors = planned_factors(field, nu, method, n, options);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::BudgetExceeded || e.kind() == ErrorKind::NonConvergent ||
          e.kind() == ErrorKind::QTooClose) {
        break;
      }
      throw;
    }
    if (factors > options.factor_budget) break;
    out.push_back(n);
  }
  return out;
}

nlohmann::json to_json(const ConvergenceTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ConvergenceRow& row : table.rows) {
    nlohmann::json r = to_json(row.estimate);
    r["index"] = row.n;
    r["delta_dec"] = row.delta ? nlohmann::json(row.delta->to_decimal()) : nlohmann::json(nullptr);
    r["richardson_dec"] = row.richardson ? nlohmann::json(row.richardson->to_decimal()) : nlohmann::json(nullptr);
    rows.push_back(std::move(r));
  }
  nlohmann::json j = {{"method", to_string(table.method)}, {"rows", rows},
                      {"deltas_decrease", table.deltas_decrease()}};
  if (table.limit) {
    j["limit_dec"] = table.limit->value.to_decimal();
    j["limit_err_dec"] = table.limit->err_est.to_decimal();
    j["limit_order"] = table.limit->order;
  } else {
    j["limit_dec"] = nullptr;
  }
  return j;
}

nlohmann::json literal_discrepancy_report(const LengthOneField& field, const PrincipalConductor& nu,
                                          const std::vector<std::uint64_t>& n_list, const EvalOptions& options) {
  EvalOptions literal = options;
  literal.mode = Expr2Mode::PaperLiteral;
  EvalOptions derived = options;
  derived.mode = Expr2Mode::Derived;
  ConvergenceTable ref = converge(field, nu, Method::Expr1Limit, n_list, options);
  ConvergenceTable lit = converge(field, nu, Method::Expr2SingleQ, n_list, literal);
  ConvergenceTable der = converge(field, nu, Method::Expr2SingleQ, n_list, derived);

  auto values = [](const ConvergenceTable& t) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : t.rows) out.push_back({{"n", row.n}, {"value_dec", row.estimate.value.to_decimal(20)}});
    return out;
  };
  nlohmann::json report = {
      {"a", field.a()},
      {"d", field.d()},
      {"m", nu.rational_value()},
      {"n", n_list},
      {"expr1", values(ref)},
      {"expr2_derived", values(der)},
      {"expr2_paper_literal", values(lit)},
      {"paper_literal_note", "the k=0, r=0 factor 1 - 1 = 0 appears on both sides and is dropped"},
  };
  if (!ref.limit || !lit.limit) {
    report["verdict"] = "insufficient_data";
    return report;
  }
  HPReal distance = abs(lit.limit->value - ref.limit->value);
  HPReal allowed = 10 * max(lit.limit->err_est, ref.limit->err_est);
  bool settles = lit.deltas_decrease();
  bool converges = settles && distance <= allowed;
  HPReal last_gap = abs(lit.rows.back().estimate.value - ref.limit->value);
  report["expr1_limit_dec"] = ref.limit->value.to_decimal(20);
  report["expr1_limit_err_dec"] = ref.limit->err_est.to_decimal(6);
  report["paper_literal_extrapolated_dec"] = lit.limit->value.to_decimal(20);
  report["paper_literal_err_dec"] = lit.limit->err_est.to_decimal(6);
  report["paper_literal_deltas_decrease"] = settles;
  report["paper_literal_last_gap_dec"] = last_gap.to_decimal(6);
  report["distance_dec"] = distance.to_decimal(6);
  report["allowed_dec"] = allowed.to_decimal(6);
  report["paper_literal_converges_to_expr1"] = converges;
  report["verdict"] = converges ? "converges" : "does_not_converge";
  return report;
}

// ------------------------------------------------------------- challenge

namespace {

ChallengeValue challenge(const LengthOneField& field, long m, std::uint64_t k, std::uint64_t n,
                         const EvalOptions& options, bool cosh_form) {
  if (m < 1) fail(ErrorKind::Domain, "m must be positive");
  check_precision(options.precision);
  GeodesicIndex idx = geodesic_index(field.a(), n);
  if (!idx.t.fits_ulong_p() || idx.t.get_ui() + 1 > options.factor_budget) {
    fail(ErrorKind::BudgetExceeded, "challenge product at n = " + std::to_string(n) + " needs T_n + 1 = " +
                                        BigInt(idx.t + 1).get_str() + " factors, budget is " +
                                        std::to_string(options.factor_budget));
  }
  const std::uint64_t t = idx.t.get_ui();
  const int prec = options.precision;
  // cancellation in -cos^2 + cosh^2 near r = 0 costs up to 2 log2(T) bits
  const int wp = prec + 32 + 2 * static_cast<int>(mpz_sizeinbase(idx.t.get_mpz_t(), 2));
  HPReal pi_w = pi(wp);
  HPReal pi_sqrt_d = pi_w * sqrt(HPReal(field.d(), wp));
  BigRational slope = BigRational(idx.next, idx.t) + BigRational(1, m);
  slope.canonicalize();

  ChallengeValue out{HPReal(1L, wp), std::nullopt, HPReal(wp), 0, t + 1};
  for (std::uint64_t r = 0; r <= t; ++r) {
    BigRational u = fractional_part(BigRational(BigInt(r)) * slope);
    BigRational v = BigRational(BigInt(r), idx.t) + BigRational(BigInt(k));
    v.canonicalize();
    if (u == 0 && v == 0) {
      out.value = HPReal(wp);
      ++out.vanishing_factors;
      continue;
    }
    HPReal pu = pi_w * HPReal(u, wp);
    HPReal pv = pi_sqrt_d * HPReal(v, wp);
    HPReal f(wp);
    if (cosh_form) {
      HPReal c = cos(pu), ch = cosh(pv);
      f = ch * ch - c * c;
    } else {
      HPReal s = sin(pu), sh = sinh(pv);
      f = s * s + sh * sh;
    }
    out.value *= f;
    out.log_nonvanishing += log(f);
  }
  if (out.vanishing_factors == 0) out.log_value = out.log_nonvanishing.with_precision(prec);
  out.value = out.value.with_precision(prec);
  out.log_nonvanishing = out.log_nonvanishing.with_precision(prec);
  return out;
}

}  // namespace

ChallengeValue challenge_product(const LengthOneField& field, long m, std::uint64_t k, std::uint64_t n,
                                 const EvalOptions& options) {
  return challenge(field, m, k, n, options, false);
}

ChallengeValue challenge_product_cosh(const LengthOneField& field, long m, std::uint64_t k, std::uint64_t n,
                                      const EvalOptions& options) {
  return challenge(field, m, k, n, options, true);
}

SineIdentityResult sine_identity_check(std::uint64_t n, const HPReal& x, int precision) {
  if (n == 0) fail(ErrorKind::Domain, "n must be at least 1");
  check_precision(precision);
  const int wp = precision + 32 + 2 * std::bit_width(n);
  HPReal xw = x.with_precision(wp);
  HPReal lhs = sin(xw * HPReal(static_cast<long>(n), wp));
  HPReal rhs = power_of_two(static_cast<long>(n) - 1, wp);
  HPReal p = pi(wp);
  for (std::uint64_t r = 0; r < n; ++r) {
    rhs *= sin(p * HPReal(static_cast<long>(r), wp) / HPReal(static_cast<long>(n), wp) + xw);
  }
  HPReal scale = max(HPReal(1L, wp), abs(lhs));
  bool holds = abs(lhs - rhs) <= power_of_two(20 - precision, wp) * scale;
  return {holds, lhs.with_precision(precision), rhs.with_precision(precision)};
}

}  // namespace shintani
