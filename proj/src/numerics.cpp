#include "shintani/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace shintani {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Precision: return "PrecisionError";
    case ErrorKind::NotSquareFree: return "NotSquareFree";
    case ErrorKind::EvenDigit: return "EvenDigit";
    case ErrorKind::NonIntegral: return "NonIntegral";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::ZeroConductor: return "ZeroConductor";
    case ErrorKind::UnitConductor: return "UnitConductor";
    case ErrorKind::PeriodMismatch: return "PeriodMismatch";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::QTooClose: return "QTooClose";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::SlowConvergence: return "SlowConvergence";
    case ErrorKind::ConductorNotRational: return "ConductorNotRational";
    case ErrorKind::TailTooLarge: return "TailTooLarge";
    case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

void check_precision(int bits) {
  if (bits < kMinPrecision) {
    fail(ErrorKind::Precision,
         "precision " + std::to_string(bits) + " below minimum " + std::to_string(kMinPrecision));
  }
}

// ---------------------------------------------------------------- HPReal

HPReal::HPReal(int precision) {
  check_precision(precision);
  mpfr_init2(value_, precision);
  mpfr_set_zero(value_, 1);
}

HPReal::HPReal(long value, int precision) : HPReal(precision) { mpfr_set_si(value_, value, MPFR_RNDN); }

HPReal::HPReal(double value, int precision) : HPReal(precision) { mpfr_set_d(value_, value, MPFR_RNDN); }

HPReal::HPReal(const BigInt& value, int precision) : HPReal(precision) {
  mpfr_set_z(value_, value.get_mpz_t(), MPFR_RNDN);
}

HPReal::HPReal(const BigRational& value, int precision) : HPReal(precision) {
  mpfr_set_q(value_, value.get_mpq_t(), MPFR_RNDN);
}

HPReal::HPReal(std::string_view literal, int precision) : HPReal(precision) {
  std::string text(literal);
  char* end = nullptr;
  mpfr_strtofr(value_, text.c_str(), &end, 10, MPFR_RNDN);
  if (end == text.c_str() || *end != '\0') fail(ErrorKind::Parse, "not a decimal number: '" + text + "'");
}

HPReal::HPReal(const HPReal& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

HPReal::HPReal(HPReal&& other) noexcept {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_swap(value_, other.value_);
}

HPReal& HPReal::operator=(const HPReal& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

HPReal& HPReal::operator=(HPReal&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

HPReal::~HPReal() { mpfr_clear(value_); }

HPReal HPReal::with_precision(int bits) const {
  HPReal out(bits);
  mpfr_set(out.value_, value_, MPFR_RNDN);
  return out;
}

std::string HPReal::to_decimal(int digits) const {
  if (!is_finite()) return mpfr_nan_p(value_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
  if (is_zero()) return mpfr_signbit(value_) ? "-0" : "0";
  if (digits <= 0) digits = static_cast<int>(mpfr_get_str_ndigits(10, mpfr_get_prec(value_)));
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, "%.*Re", digits - 1, value_);
  std::string out(buffer);
  mpfr_free_str(buffer);
  return out;
}

BigInt HPReal::round_to_integer() const {
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDNA);
  return out;
}

BigInt HPReal::floor_to_integer() const {
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDD);
  return out;
}

namespace {

int joint(const HPReal& a, const HPReal& b) { return std::max(a.precision(), b.precision()); }

template <typename Op>
HPReal binary(const HPReal& a, const HPReal& b, Op op) {
  HPReal out(joint(a, b));
  op(out.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return out;
}

template <typename Op>
HPReal unary(const HPReal& x, Op op) {
  HPReal out(x.precision());
  op(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

}  // namespace

HPReal& HPReal::operator+=(const HPReal& rhs) { return *this = *this + rhs; }
HPReal& HPReal::operator-=(const HPReal& rhs) { return *this = *this - rhs; }
HPReal& HPReal::operator*=(const HPReal& rhs) { return *this = *this * rhs; }
HPReal& HPReal::operator/=(const HPReal& rhs) { return *this = *this / rhs; }
HPReal& HPReal::operator*=(long rhs) {
  mpfr_mul_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}
HPReal& HPReal::operator/=(long rhs) {
  mpfr_div_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

HPReal operator-(const HPReal& x) { return unary(x, mpfr_neg); }
HPReal operator+(const HPReal& a, const HPReal& b) { return binary(a, b, mpfr_add); }
HPReal operator-(const HPReal& a, const HPReal& b) { return binary(a, b, mpfr_sub); }
HPReal operator*(const HPReal& a, const HPReal& b) { return binary(a, b, mpfr_mul); }
HPReal operator/(const HPReal& a, const HPReal& b) { return binary(a, b, mpfr_div); }
HPReal operator*(const HPReal& a, long b) {
  HPReal out(a.precision());
  mpfr_mul_si(out.raw(), a.raw(), b, MPFR_RNDN);
  return out;
}
HPReal operator*(long a, const HPReal& b) { return b * a; }
HPReal operator/(const HPReal& a, long b) {
  HPReal out(a.precision());
  mpfr_div_si(out.raw(), a.raw(), b, MPFR_RNDN);
  return out;
}
HPReal operator+(const HPReal& a, long b) {
  HPReal out(a.precision());
  mpfr_add_si(out.raw(), a.raw(), b, MPFR_RNDN);
  return out;
}
HPReal operator-(const HPReal& a, long b) {
  HPReal out(a.precision());
  mpfr_sub_si(out.raw(), a.raw(), b, MPFR_RNDN);
  return out;
}
HPReal operator-(long a, const HPReal& b) {
  HPReal out(b.precision());
  mpfr_si_sub(out.raw(), a, b.raw(), MPFR_RNDN);
  return out;
}

HPReal operator+(long a, const HPReal& b) { return b + a; }

bool operator==(const HPReal& a, const HPReal& b) { return mpfr_equal_p(a.raw(), b.raw()) != 0; }

std::partial_ordering operator<=>(const HPReal& a, const HPReal& b) {
  if (mpfr_unordered_p(a.raw(), b.raw())) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.raw(), b.raw());
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

bool identical(const HPReal& a, const HPReal& b) {
  return a.precision() == b.precision() && (mpfr_equal_p(a.raw(), b.raw()) != 0 || (mpfr_nan_p(a.raw()) && mpfr_nan_p(b.raw())));
}

HPReal abs(const HPReal& x) { return unary(x, mpfr_abs); }

HPReal sqrt(const HPReal& x) {
  if (x.sign() < 0) fail(ErrorKind::Domain, "sqrt of negative argument " + x.to_decimal(20));
  return unary(x, mpfr_sqrt);
}

HPReal exp(const HPReal& x) { return unary(x, mpfr_exp); }

HPReal log(const HPReal& x) {
  if (x.sign() <= 0) fail(ErrorKind::Domain, "log of non-positive argument " + x.to_decimal(20));
  return unary(x, mpfr_log);
}

HPReal sin(const HPReal& x) { return unary(x, mpfr_sin); }
HPReal cos(const HPReal& x) { return unary(x, mpfr_cos); }
HPReal sinh(const HPReal& x) { return unary(x, mpfr_sinh); }
HPReal cosh(const HPReal& x) { return unary(x, mpfr_cosh); }
HPReal atan2(const HPReal& y, const HPReal& x) {
  if (y.is_zero() && x.is_zero()) fail(ErrorKind::Domain, "atan2(0, 0)");
  return binary(y, x, mpfr_atan2);
}

HPReal pow(const HPReal& x, long e) {
  HPReal out(x.precision());
  mpfr_pow_si(out.raw(), x.raw(), e, MPFR_RNDN);
  return out;
}

HPReal ldexp(const HPReal& x, long e) {
  HPReal out(x.precision());
  mpfr_mul_2si(out.raw(), x.raw(), e, MPFR_RNDN);
  return out;
}

HPReal pi(int precision) {
  HPReal out(precision);
  mpfr_const_pi(out.raw(), MPFR_RNDN);
  return out;
}

HPReal log2_value(const HPReal& x) {
  if (x.sign() <= 0) fail(ErrorKind::Domain, "log2 of non-positive argument");
  return unary(x, mpfr_log2);
}

HPReal max(const HPReal& a, const HPReal& b) { return a < b ? b : a; }
HPReal min(const HPReal& a, const HPReal& b) { return b < a ? b : a; }

HPReal power_of_two(long e, int precision) {
  HPReal out(precision);
  mpfr_set_ui_2exp(out.raw(), 1, e, MPFR_RNDN);
  return out;
}

Elementary parse_elementary(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, Elementary>, 9> kNames{{
      {"exp", Elementary::Exp},
      {"log", Elementary::Log},
      {"sqrt", Elementary::Sqrt},
      {"sin", Elementary::Sin},
      {"cos", Elementary::Cos},
      {"sinh", Elementary::Sinh},
      {"cosh", Elementary::Cosh},
      {"atan2", Elementary::Atan2},
      {"pi", Elementary::Pi},
  }};
  for (const auto& [key, fn] : kNames)
    if (key == name) return fn;
  fail(ErrorKind::Domain, "unknown elementary function '" + std::string(name) + "'");
}

HPReal eval_elementary(Elementary fn, std::span<const HPReal> args, int precision) {
  check_precision(precision);
  std::size_t arity = fn == Elementary::Pi ? 0 : (fn == Elementary::Atan2 ? 2 : 1);
  if (args.size() != arity) {
    fail(ErrorKind::Domain, "expected " + std::to_string(arity) + " argument(s), got " + std::to_string(args.size()));
  }
  auto arg = [&](std::size_t i) { return args[i].with_precision(precision); };
  switch (fn) {
    case Elementary::Exp: return exp(arg(0));
    case Elementary::Log: return log(arg(0));
    case Elementary::Sqrt: return sqrt(arg(0));
    case Elementary::Sin: return sin(arg(0));
    case Elementary::Cos: return cos(arg(0));
    case Elementary::Sinh: return sinh(arg(0));
    case Elementary::Cosh: return cosh(arg(0));
    case Elementary::Atan2: return atan2(arg(0), arg(1));
    case Elementary::Pi: return pi(precision);
  }
  fail(ErrorKind::Domain, "unreachable");
}

HPReal eval_elementary(std::string_view name, std::initializer_list<HPReal> args, int precision) {
  std::vector<HPReal> list(args);
  return eval_elementary(parse_elementary(name), list, precision);
}

HPReal rational_to_hp(const BigRational& x, int precision) { return HPReal(x, precision); }

// ---------------------------------------------------------------- HPComplex

HPComplex::HPComplex(HPReal re, HPReal im) : re_(std::move(re)), im_(std::move(im)) {
  int p = std::max(re_.precision(), im_.precision());
  if (re_.precision() != p) re_ = re_.with_precision(p);
  if (im_.precision() != p) im_ = im_.with_precision(p);
}

HPComplex::HPComplex(HPReal re) : re_(std::move(re)), im_(re_.precision()) {}

HPComplex& HPComplex::operator+=(const HPComplex& rhs) {
  re_ += rhs.re_;
  im_ += rhs.im_;
  return *this;
}

HPComplex& HPComplex::operator-=(const HPComplex& rhs) {
  re_ -= rhs.re_;
  im_ -= rhs.im_;
  return *this;
}

HPComplex& HPComplex::operator*=(const HPComplex& rhs) {
  HPReal re = re_ * rhs.re_ - im_ * rhs.im_;
  HPReal im = re_ * rhs.im_ + im_ * rhs.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

HPComplex& HPComplex::operator/=(const HPComplex& rhs) {
  HPReal den = norm_squared(rhs);
  if (den.is_zero()) fail(ErrorKind::Domain, "complex division by zero");
  HPReal re = (re_ * rhs.re_ + im_ * rhs.im_) / den;
  HPReal im = (im_ * rhs.re_ - re_ * rhs.im_) / den;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

HPReal abs(const HPComplex& z) { return binary(z.re(), z.im(), mpfr_hypot); }

HPReal norm_squared(const HPComplex& z) { return z.re() * z.re() + z.im() * z.im(); }

HPReal arg(const HPComplex& z) { return atan2(z.im(), z.re()); }

HPComplex conj(const HPComplex& z) { return {z.re(), -z.im()}; }

HPComplex unit_phase(const HPReal& theta) {
  HPReal s(theta.precision()), c(theta.precision());
  mpfr_sin_cos(s.raw(), c.raw(), theta.raw(), MPFR_RNDN);
  return {std::move(c), std::move(s)};
}

HPComplex exp(const HPComplex& z) { return exp(z.re()) * unit_phase(z.im()); }

HPComplex complex_exp_2pi_i(const HPReal& t, int precision) {
  check_precision(precision);
  // Reduce modulo 1 at extra precision so large |t| keeps full accuracy.
  int extra = precision + std::max<long>(0, t.is_zero() ? 0 : t.exponent()) + 16;
  HPReal tt = t.with_precision(extra);
  HPReal frac(extra);
  mpfr_frac(frac.raw(), tt.raw(), MPFR_RNDN);
  HPReal theta = ldexp(pi(precision + 8) * frac.with_precision(precision + 8), 1);
  return unit_phase(theta).with_precision(precision);
}

HPComplex complex_exp_2pi_i(const HPComplex& t, int precision) {
  HPComplex phase = complex_exp_2pi_i(t.re(), precision);
  HPReal scale = exp(ldexp(-pi(precision + 8) * t.im().with_precision(precision + 8), 1)).with_precision(precision);
  return phase * scale;
}

HPComplex complex_exp_2pi_i(const BigRational& t, int precision) {
  check_precision(precision);
  BigRational frac = fractional_part(t);
  HPReal theta = ldexp(pi(precision + 8) * HPReal(frac, precision + 8), 1);
  return unit_phase(theta).with_precision(precision);
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

BigRational fractional_part(const BigRational& r) {
  BigInt fl = floor_div(r.get_num(), r.get_den());
  BigRational out = r - BigRational(fl);
  out.canonicalize();
  return out;
}

int guarded_precision(int target_bits, std::uint64_t factors) {
  int log2n = 0;
  while (log2n < 64 && (std::uint64_t{1} << log2n) < factors) ++log2n;
  return target_bits + log2n + 32;
}

std::string to_string(const BigRational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace shintani
