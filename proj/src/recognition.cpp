#include "shintani/recognition.hpp"

#include <cmath>

namespace shintani {

namespace {

using Matrix = std::vector<std::vector<HPReal>>;
using IntMatrix = std::vector<std::vector<BigInt>>;

BigInt nearest(const HPReal& x) { return x.round_to_integer(); }

double log2_height(const BigInt& h) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, h.get_mpz_t());
  return std::log2(mant) + static_cast<double>(exp);
}

// Reduces row i of H against rows j < i (size-reduction of PSLQ).
void reduce_entry(Matrix& h, std::vector<HPReal>& y, IntMatrix& a, IntMatrix& b, std::size_t i, std::size_t j) {
  const std::size_t n = y.size();
  BigInt t = nearest(h[i][j] / h[j][j]);
  if (t == 0) return;
  HPReal tr(t, h[i][j].precision());
  y[j] += tr * y[i];
  for (std::size_t k = 0; k <= j; ++k) h[i][k] -= tr * h[j][k];
  for (std::size_t k = 0; k < n; ++k) {
    a[i][k] -= t * a[j][k];
    b[k][j] += t * b[k][i];
  }
}

}  // namespace

std::optional<RelationCandidate> integer_relation(const std::vector<HPReal>& values, const BigInt& max_height,
                                                  const HPReal& tol, const RelationOptions& options) {
  const std::size_t n = values.size();
  if (n < 2) fail(ErrorKind::Domain, "integer_relation needs at least two values");
  if (max_height <= 0) fail(ErrorKind::Domain, "max_height must be positive");
  if (tol.sign() <= 0) fail(ErrorKind::Domain, "tol must be positive");
  int prec = values[0].precision();
  for (const HPReal& v : values) prec = std::min(prec, v.precision());
  const double needed = 4.0 * std::max(1.0, log2_height(max_height)) * static_cast<double>(n);
  if (prec < needed) {
    fail(ErrorKind::InsufficientPrecision, "relation search over " + std::to_string(n) + " values with height " +
                                               max_height.get_str() + " needs " +
                                               std::to_string(static_cast<int>(std::ceil(needed))) + " bits, got " +
                                               std::to_string(prec));
  }

  // Trivial relations: a zero entry.
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i].is_zero()) {
      RelationCandidate c;
      c.coefficients.assign(n, BigInt(0));
      c.coefficients[i] = 1;
      c.residual = HPReal(prec);
      c.degree = static_cast<int>(n) - 1;
      c.height = 1;
      return c;
    }
  }

  const HPReal gamma = sqrt(HPReal(4L, prec) / 3);
  std::vector<HPReal> y;
  for (const HPReal& v : values) y.push_back(v.with_precision(prec));
  // s_k = sqrt(sum_{j >= k} y_j^2), normalised so that s_0 = 1.
  std::vector<HPReal> s(n, HPReal(prec));
  HPReal acc(prec);
  for (std::size_t k = n; k-- > 0;) {
    acc += y[k] * y[k];
    s[k] = sqrt(acc);
  }
  const HPReal norm = s[0];
  for (auto& v : y) v /= norm;
  for (auto& v : s) v /= norm;

  Matrix h(n, std::vector<HPReal>(n - 1, HPReal(prec)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n - 1 && j <= i; ++j) {
      if (i == j) {
        h[i][j] = s[j + 1] / s[j];
      } else {
        h[i][j] = -(y[i] * y[j]) / (s[j] * s[j + 1]);
      }
    }
  }
  IntMatrix a(n, std::vector<BigInt>(n, BigInt(0)));
  IntMatrix b(n, std::vector<BigInt>(n, BigInt(0)));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = b[i][i] = 1;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = i; j-- > 0;) reduce_entry(h, y, a, b, i, j);
  }

  // Inputs are only as accurate as tol, so y_j = (c . x)/|x| cannot be
  // expected to fall much below tol/|x|.
  const HPReal detect = max(power_of_two(-prec + 16 + static_cast<long>(2 * log2_height(max_height)), prec),
                            tol.with_precision(prec) / norm);
  const HPReal max_norm = HPReal(max_height, prec) * sqrt(HPReal(static_cast<long>(n), prec));

  auto make_candidate = [&](std::size_t col) -> std::optional<RelationCandidate> {
    RelationCandidate c;
    BigInt height = 0;
    HPReal residual(prec + 64);
    for (std::size_t i = 0; i < n; ++i) {
      c.coefficients.push_back(b[i][col]);
      height = std::max(height, BigInt(abs(b[i][col])));
      residual += HPReal(b[i][col], prec + 64) * values[i].with_precision(prec + 64);
    }
    c.height = height;
    c.residual = abs(residual).with_precision(prec);
    c.degree = static_cast<int>(n) - 1;
    if (height == 0 || height > max_height || c.residual > tol) return std::nullopt;
    return c;
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // 1. exchange position
    std::size_t m = 0;
    HPReal best(prec);
    HPReal g_pow(1L, prec);
    for (std::size_t i = 0; i < n - 1; ++i) {
      g_pow *= gamma;
      HPReal v = g_pow * abs(h[i][i]);
      if (i == 0 || v > best) {
        best = v;
        m = i;
      }
    }
    // 2. swap
    std::swap(y[m], y[m + 1]);
    std::swap(a[m], a[m + 1]);
    std::swap(h[m], h[m + 1]);
    for (std::size_t k = 0; k < n; ++k) std::swap(b[k][m], b[k][m + 1]);
    // 3. corner
    if (m + 2 < n) {
      HPReal t0 = sqrt(h[m][m] * h[m][m] + h[m][m + 1] * h[m][m + 1]);
      HPReal t1 = h[m][m] / t0;
      HPReal t2 = h[m][m + 1] / t0;
      for (std::size_t i = m; i < n; ++i) {
        HPReal t3 = h[i][m];
        HPReal t4 = h[i][m + 1];
        h[i][m] = t1 * t3 + t2 * t4;
        h[i][m + 1] = t1 * t4 - t2 * t3;
      }
    }
    // 4. reduction
    for (std::size_t i = m + 1; i < n; ++i) {
      for (std::size_t j = std::min(i - 1, m + 1) + 1; j-- > 0;) reduce_entry(h, y, a, b, i, j);
    }
    // 5. termination
    for (std::size_t j = 0; j < n; ++j) {
      if (abs(y[j]) <= detect) return make_candidate(j);
    }
    HPReal hmax(prec);
    for (std::size_t j = 0; j + 1 < n; ++j) hmax = max(hmax, abs(h[j][j]));
    if (hmax.is_zero()) return std::nullopt;
    // every relation has Euclidean norm >= 1/max|H_jj|
    if (HPReal(1L, prec) / hmax > max_norm) return std::nullopt;
  }
  return std::nullopt;
}

HPReal evaluate_polynomial(const std::vector<BigInt>& coefficients, const HPReal& x) {
  HPReal acc(x.precision());
  for (std::size_t i = coefficients.size(); i-- > 0;) {
    acc *= x;
    acc += HPReal(coefficients[i], x.precision());
  }
  return acc;
}

namespace {

bool has_rational_root(const std::vector<BigInt>& c) {
  // candidates p/q with p | c_0 and q | c_deg
  if (c.front() == 0) return true;
  auto divisors = [](BigInt v) {
    v = abs(v);
    std::vector<BigInt> out;
    for (BigInt i = 1; i * i <= v; ++i) {
      if (v % i == 0) {
        out.push_back(i);
        if (i * i != v) out.push_back(v / i);
      }
    }
    return out;
  };
  for (const BigInt& p : divisors(c.front())) {
    for (const BigInt& q : divisors(c.back())) {
      for (int sign : {1, -1}) {
        BigRational r(sign * p, q);
        r.canonicalize();
        BigRational acc = 0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * r + BigRational(c[i]);
        if (acc == 0) return true;
      }
    }
  }
  return false;
}

}  // namespace

std::optional<RelationCandidate> recognize_minpoly(const HPReal& x, int max_degree, const BigInt& max_height,
                                                   const HPReal& tol) {
  if (max_degree < 1) fail(ErrorKind::Domain, "max_degree must be at least 1");
  const int prec = x.precision();
  for (int degree = 1; degree <= max_degree; ++degree) {
    std::vector<HPReal> powers{HPReal(1L, prec)};
    for (int i = 1; i <= degree; ++i) powers.push_back(powers.back() * x);
    auto found = integer_relation(powers, max_height, tol);
    if (!found) continue;
    auto& c = found->coefficients;
    while (c.size() > 1 && c.back() == 0) c.pop_back();
    if (c.size() < 2) continue;  // constant relation: cannot happen for a nonzero 1
    BigInt content = 0;
    for (const BigInt& v : c) content = gcd(content, v);
    if (content > 1) {
      for (BigInt& v : c) v /= content;
      found->height /= content;
    }
    if (c.back() < 0) {
      for (BigInt& v : c) v = -v;
    }
    found->degree = static_cast<int>(c.size()) - 1;
    found->residual = abs(evaluate_polynomial(c, x));
    found->has_rational_root = found->degree > 1 && has_rational_root(c);
    return found;
  }
  return std::nullopt;
}

std::string polynomial_to_string(const std::vector<BigInt>& c) {
  std::string out;
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] == 0) continue;
    BigInt mag = abs(c[i]);
    if (out.empty()) {
      if (c[i] < 0) out += "-";
    } else {
      out += c[i] < 0 ? " - " : " + ";
    }
    bool show = mag != 1 || i == 0;
    if (show) out += mag.get_str();
    if (i > 0) {
      if (show) out += "*";
      out += "X";
      if (i > 1) out += "^" + std::to_string(i);
    }
  }
  return out.empty() ? "0" : out;
}

nlohmann::json to_json(const RelationCandidate& candidate) {
  nlohmann::json coefficients = nlohmann::json::array();
  for (const BigInt& v : candidate.coefficients) coefficients.push_back(v.get_str());
  nlohmann::json j = {
      {"degree", candidate.degree},
      {"coefficients", coefficients},
      {"residual_dec", candidate.residual.to_decimal()},
      {"height", candidate.height.get_str()},
      {"polynomial", polynomial_to_string(candidate.coefficients)},
  };
  if (candidate.has_rational_root) j["has_rational_root"] = *candidate.has_rational_root;
  return j;
}

}  // namespace shintani
