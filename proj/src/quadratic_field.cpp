#include "shintani/quadratic_field.hpp"

#include <cctype>

namespace shintani {

namespace {

bool is_integer(const BigRational& r) { return r.get_den() == 1; }

BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

}  // namespace

// ---------------------------------------------------------------- elements

FieldElement::FieldElement(BigRational p, BigRational q, long d) : p_(std::move(p)), q_(std::move(q)), d_(d) {
  p_.canonicalize();
  q_.canonicalize();
}

bool FieldElement::is_integral() const {
  BigRational tp = 2 * p_;
  BigRational tq = 2 * q_;
  tp.canonicalize();
  tq.canonicalize();
  if (!is_integer(tp) || !is_integer(tq)) return false;
  BigInt diff = tp.get_num() - tq.get_num();
  return mpz_even_p(diff.get_mpz_t()) != 0;
}

std::pair<BigInt, BigInt> FieldElement::integral_coordinates() const {
  if (!is_integral()) fail(ErrorKind::NonIntegral, to_string() + " is not in O_K");
  // p + q·sqrt d = (p - q) + 2q·omega
  BigRational a = p_ - q_;
  BigRational b = 2 * q_;
  a.canonicalize();
  b.canonicalize();
  return {a.get_num(), b.get_num()};
}

FieldElement FieldElement::inverse() const {
  if (is_zero()) fail(ErrorKind::Domain, "inverse of zero");
  BigRational n = norm_trace(*this).norm;
  return FieldElement(p_ / n, -q_ / n, d_);
}

HPReal FieldElement::to_hp(const HPReal& sqrt_d) const {
  int prec = sqrt_d.precision();
  return HPReal(p_, prec) + HPReal(q_, prec) * sqrt_d;
}

std::string FieldElement::to_string() const {
  if (q_ == 0) return shintani::to_string(p_);
  std::string out;
  if (p_ != 0) out = shintani::to_string(p_) + (q_ > 0 ? "+" : "-");
  else if (q_ < 0) out = "-";
  BigRational aq = abs(q_);
  if (aq != 1) out += shintani::to_string(aq) + "*";
  return out + "sqrt(" + std::to_string(d_) + ")";
}

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  return FieldElement(a.p_ + b.p_, a.q_ + b.q_, a.d_);
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  return FieldElement(a.p_ - b.p_, a.q_ - b.q_, a.d_);
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  return FieldElement(a.p_ * b.p_ + BigRational(a.d_) * a.q_ * b.q_, a.p_ * b.q_ + a.q_ * b.p_, a.d_);
}

FieldElement operator*(const BigRational& s, const FieldElement& b) {
  return FieldElement(s * b.p_, s * b.q_, b.d_);
}

FieldElement conjugate(const FieldElement& x) { return FieldElement(x.p(), -x.q(), x.d()); }

NormTrace norm_trace(const FieldElement& x) {
  BigRational norm = x.p() * x.p() - BigRational(x.d()) * x.q() * x.q();
  BigRational trace = 2 * x.p();
  norm.canonicalize();
  trace.canonicalize();
  return {norm, trace};
}

// ---------------------------------------------------------------- fields

bool is_square_free(long n) {
  if (n <= 0) return false;
  for (long p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
    while (n % p == 0) n /= p;
  }
  return true;
}

FieldElement LengthOneField::epsilon() const { return {BigRational(a_, 2), BigRational(1, 2), d_}; }

FieldElement LengthOneField::epsilon_conjugate() const { return conjugate(epsilon()); }

FieldElement LengthOneField::omega() const { return {BigRational(1, 2), BigRational(1, 2), d_}; }

LengthOneField make_field(long a) {
  if (a < 3) fail(ErrorKind::Domain, "minus continued fraction digit must be >= 3, got " + std::to_string(a));
  if (a % 2 == 0) {
    fail(ErrorKind::EvenDigit,
         "a = " + std::to_string(a) + " is even, so a^2 - 4 = " + std::to_string(a * a - 4) + " is divisible by 4");
  }
  if (a > 3'000'000'000L) fail(ErrorKind::Domain, "digit too large");
  long d = a * a - 4;
  if (!is_square_free(d)) {
    fail(ErrorKind::NotSquareFree, "a^2 - 4 = " + std::to_string(d) + " is not square-free");
  }
  return LengthOneField(a, d);
}

LengthOneField field_from_discriminant(long d) {
  if (d <= 0) fail(ErrorKind::Domain, "d must be positive");
  long a = 0;
  while ((a + 1) * (a + 1) <= d + 4) ++a;
  if (a * a != d + 4) {
    fail(ErrorKind::Domain, "d = " + std::to_string(d) + " is not of the form a^2 - 4 (minus continued fraction of length one)");
  }
  return make_field(a);
}

// ---------------------------------------------------------------- conductors

long PrincipalConductor::rational_value() const {
  if (!nu_.is_rational()) fail(ErrorKind::ConductorNotRational, "conductor " + to_string() + " is not a rational integer");
  return BigRational(abs(nu_.p())).get_num().get_si();
}

std::string PrincipalConductor::to_string() const { return nu_.to_string(); }

PrincipalConductor make_conductor(const LengthOneField& field, const FieldElement& nu) {
  if (nu.d() != field.d()) fail(ErrorKind::Config, "conductor lives in Q(sqrt " + std::to_string(nu.d()) + ")");
  if (nu.is_zero()) fail(ErrorKind::ZeroConductor, "conductor is zero");
  if (!nu.is_integral()) fail(ErrorKind::NonIntegral, nu.to_string() + " is not integral");
  BigInt norm = BigRational(abs(norm_trace(nu).norm)).get_num();
  if (norm == 1) fail(ErrorKind::UnitConductor, nu.to_string() + " is a unit");
  return PrincipalConductor(nu, norm);
}

PrincipalConductor rational_conductor(const LengthOneField& field, long m) {
  return make_conductor(field, field.rational(m));
}

// ---------------------------------------------------------------- parser

namespace {

class IdealParser {
 public:
  IdealParser(std::string_view text, long d) : text_(text), d_(d) {}

  FieldElement parse() {
    skip();
    FieldElement out;
    if (peek() == '(') {
      ++pos_;
      out = parse_linear(true);
      expect(')');
      expect('/');
      std::size_t at = pos_;
      if (parse_int() != 2) throw ParseError(at, "only division by 2 is supported");
      out = BigRational(1, 2) * out;
    } else {
      out = parse_linear(false);
    }
    skip();
    if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
    return out;
  }

 private:
  FieldElement parse_linear(bool inside_parens) {
    BigInt p = parse_int();
    skip();
    if (pos_ == text_.size() || (inside_parens && peek() == ')')) {
      if (inside_parens) throw ParseError(pos_, "expected '+' or '-' followed by INT*sqrt(INT)");
      return FieldElement(BigRational(p), BigRational(0), d_);
    }
    char op = peek();
    if (op != '+' && op != '-') throw ParseError(pos_, "expected '+' or '-'");
    ++pos_;
    BigInt q = parse_unsigned();
    expect('*');
    skip();
    std::size_t at = pos_;
    if (text_.substr(pos_, 4) != "sqrt") throw ParseError(at, "expected 'sqrt'");
    pos_ += 4;
    expect('(');
    std::size_t arg_at = pos_;
    skip();
    arg_at = pos_;
    BigInt radicand = parse_unsigned();
    if (radicand != d_) {
      throw Error(ErrorKind::Config, "at column " + std::to_string(arg_at) + ": sqrt argument " + radicand.get_str() +
                                         " does not match the field discriminant d = " + std::to_string(d_));
    }
    expect(')');
    if (op == '-') q = -q;
    return FieldElement(BigRational(p), BigRational(q), d_);
  }

  BigInt parse_int() {
    skip();
    bool negative = false;
    if (peek() == '-' || peek() == '+') {
      negative = peek() == '-';
      ++pos_;
    }
    BigInt v = parse_unsigned();
    return negative ? BigInt(-v) : v;
  }

  BigInt parse_unsigned() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError(start, "expected an integer");
    return BigInt(std::string(text_.substr(start, pos_ - start)));
  }

  void expect(char c) {
    skip();
    if (peek() != c) throw ParseError(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  long d_;
  std::size_t pos_ = 0;
};

}  // namespace

FieldElement parse_ideal_expression(std::string_view text, long d) {
  FieldElement x = IdealParser(text, d).parse();
  if (!x.is_integral()) fail(ErrorKind::NonIntegral, "'" + std::string(text) + "' is not an algebraic integer");
  return x;
}

// ---------------------------------------------------------------- residues

std::string Residue::to_string() const { return a.get_str() + " + " + b.get_str() + "*omega"; }

ResidueRing::ResidueRing(const LengthOneField& field, const PrincipalConductor& nu) : d_(field.d()) {
  auto [a1, b1] = nu.nu().integral_coordinates();
  auto [a2, b2] = (nu.nu() * field.omega()).integral_coordinates();
  BigInt g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), b1.get_mpz_t(), b2.get_mpz_t());
  // s·row1 + t·row2 = (beta', g); (b2/g)·row1 - (b1/g)·row2 = (alpha', 0)
  BigInt beta = s * a1 + t * a2;
  BigInt alpha = (b2 / g) * a1 - (b1 / g) * a2;
  gamma_ = abs(g);
  if (g < 0) beta = -beta;
  alpha_ = abs(alpha);
  beta_ = mod_floor(beta, alpha_);
  if (alpha_ * gamma_ != nu.norm()) {
    fail(ErrorKind::Domain, "ideal lattice index mismatch for " + nu.to_string());
  }
}

Residue ResidueRing::reduce(const BigInt& a, const BigInt& b) const {
  BigInt t = floor_div(b, gamma_);
  BigInt ra = a - t * beta_;
  BigInt rb = b - t * gamma_;
  return {mod_floor(ra, alpha_), rb};
}

Residue ResidueRing::reduce(const FieldElement& x) const {
  auto [a, b] = x.integral_coordinates();
  return reduce(a, b);
}

Residue ResidueRing::multiply(const Residue& x, const Residue& y) const {
  // omega^2 = omega + (d - 1)/4
  BigInt c = (d_ - 1) / 4;
  BigInt bb = x.b * y.b;
  return reduce(x.a * y.a + bb * c, x.a * y.b + x.b * y.a + bb);
}

Residue ResidueRing::pow(const Residue& x, std::uint64_t e) const {
  Residue result = one();
  Residue base = x;
  while (e > 0) {
    if (e & 1U) result = multiply(result, base);
    base = multiply(base, base);
    e >>= 1U;
  }
  return result;
}

Residue residue_pow(const LengthOneField& field, const FieldElement& x, std::uint64_t e,
                    const PrincipalConductor& nu) {
  ResidueRing ring(field, nu);
  return ring.pow(ring.reduce(x), e);
}

std::uint64_t unit_order(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t bound) {
  ResidueRing ring(field, nu);
  const Residue eps = ring.reduce(field.epsilon());
  const Residue one = ring.one();
  Residue power = eps;
  for (std::uint64_t g = 1; g <= bound; ++g) {
    if (power == one) return g;
    power = ring.multiply(power, eps);
  }
  fail(ErrorKind::Overflow, "order of eps modulo " + nu.to_string() + " exceeds " + std::to_string(bound));
}

// ---------------------------------------------------------------- g(p)

int kronecker(long d, long p) { return mpz_kronecker_si(BigInt(d).get_mpz_t(), p); }

bool is_prime(long p) {
  if (p < 2) return false;
  for (long q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

GFormulaCheck g_formula_check(const LengthOneField& field, long p) {
  GFormulaCheck out;
  out.p = p;
  if (!is_prime(p)) {
    out.note = "not prime";
    return out;
  }
  out.symbol = kronecker(field.d(), p);
  if (out.symbol == 0) {
    out.note = "ramified (divides the discriminant)";
    return out;
  }
  if (out.symbol == 1) {
    out.note = "split";
    return out;
  }
  out.applicable = true;
  out.g_formula = p - out.symbol;
  out.g_computed = unit_order(field, rational_conductor(field, p));
  out.agree = out.g_computed == static_cast<std::uint64_t>(out.g_formula);
  out.note = out.agree ? "inert, agrees" : "inert, order is a proper divisor of p + 1";
  return out;
}

}  // namespace shintani
