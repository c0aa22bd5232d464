#pragma once

// Shintani's invariant X_1 along the discretised geodesic (expressions 1-3
// and the double-sine product), the generic real-limit evaluations of X_1,
// X_2 and X = X_1 X_2, convergence tables, and the challenge product.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shintani/chebyshev_geodesic.hpp"
#include "shintani/cone_decomposition.hpp"
#include "shintani/numerics.hpp"
#include "shintani/qseries.hpp"
#include "shintani/quadratic_field.hpp"

namespace shintani {

enum class Method {
  Expr1Limit,
  Expr2SingleQ,
  Expr3Real,
  DoubleSineProd,
  X1Generic,
  X2Generic,
  XProduct,
};

std::string to_string(Method method);
/// Accepts the record names above and the CLI names expr1, expr2, expr3,
/// dsine, x1, x2, x. Errors: Config.
Method parse_method(std::string_view name);
/// True for the methods indexed by a geodesic point tau_n.
bool is_geodesic(Method method);

enum class Expr2Mode { Derived, PaperLiteral };
std::string to_string(Expr2Mode mode);
Expr2Mode parse_expr2_mode(std::string_view name);

/// 10^7, or SHINTANI_FACTOR_BUDGET when set to a positive integer.
std::uint64_t default_factor_budget();

struct EvalOptions {
  int precision = kDefaultPrecision;
  /// Truncation tolerance 2^-tail_bits for every infinite product; defaults
  /// to precision/4.
  std::optional<int> tail_bits;
  std::uint64_t factor_budget = default_factor_budget();
  ProductKernel kernel = ProductKernel::Auto;
  /// Which cone pair (x_l, y_l) anchors expression 1.
  std::size_t anchor = 0;
  Expr2Mode mode = Expr2Mode::Derived;
  /// Expression 3: number of k-layers; chosen from the tail bound if absent.
  std::optional<std::uint64_t> k_max;

  int tail() const { return tail_bits.value_or(precision / 4); }
};

struct InvariantEstimate {
  Method method = Method::Expr1Limit;
  /// Geodesic index (expression 3 records N = 2gj); 0 for generic methods.
  std::uint64_t n = 0;
  std::optional<std::uint64_t> j;
  HPReal value;
  HPReal err_est;
  long a = 0;
  long d = 0;
  std::string nu;
  std::optional<long> m;
  std::uint64_t g = 0;
  int precision = 0;
  std::uint64_t factors = 0;
  double wall_ms = 0.0;
  std::optional<std::string> mode;
  std::optional<std::string> note;
};

nlohmann::json to_json(const InvariantEstimate& estimate);
/// Errors: Parse on missing or malformed members.
InvariantEstimate estimate_from_json(const nlohmann::json& record);

/// Factor count the method would multiply at index n (j for expression 3).
/// Errors: as the method, without evaluating any product.
std::uint64_t planned_factors(const LengthOneField& field, const PrincipalConductor& nu, Method method,
                              std::uint64_t n, const EvalOptions& options = {});

/// |f(x_l, y_l, tau_n) / f(x_l, y_l, tau_{n+2g})| with l = options.anchor.
InvariantEstimate x1_expr1(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t n,
                           const EvalOptions& options = {});

/// |prod_{k=1..g} S(tau~_k, x_k tau~_k + y_k)| with tau~_k = tau_{n+2(g-k)}.
InvariantEstimate x1_double_sine(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t n,
                                 const EvalOptions& options = {});

/// Expression 2 for a rational conductor (m), grouped into products over
/// q~ = e^{-2π sqrt d}. Errors: ConductorNotRational.
InvariantEstimate x1_expr2(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t n,
                           const EvalOptions& options = {});

/// Expression 3 (real sin^2 + sinh^2 form) at the subsequence index j >= 0:
/// numerator at N = 2gj, denominator at N' = 2g(j+1). Errors:
/// ConductorNotRational; TailTooLarge if options.k_max is too small.
InvariantEstimate x1_expr3(const LengthOneField& field, const PrincipalConductor& nu, std::uint64_t j,
                           const EvalOptions& options = {});

/// prod_k S(eps, z_k) by the real-limit evaluator.
InvariantEstimate x1_generic(const LengthOneField& field, const PrincipalConductor& nu,
                             const EvalOptions& options = {});
/// prod_k S(eps', x_k eps' + y_k).
InvariantEstimate x2_generic(const LengthOneField& field, const PrincipalConductor& nu,
                             const EvalOptions& options = {});
/// X = X_1 X_2 from the two generic estimates.
InvariantEstimate x_product(const InvariantEstimate& x1, const InvariantEstimate& x2);

/// Dispatch for the geodesic methods.
InvariantEstimate estimate(const LengthOneField& field, const PrincipalConductor& nu, Method method,
                           std::uint64_t n, const EvalOptions& options = {});

/// Polynomial extrapolation to h = 0 of values sampled at h_i (Neville
/// table). The result is the last entry of the column whose last two entries
/// differ least; err_est is that difference.
struct Extrapolation {
  HPReal value;
  HPReal err_est;
  std::size_t order = 0;
};
Extrapolation extrapolate(const std::vector<HPReal>& h, const std::vector<HPReal>& values);

struct ConvergenceRow {
  std::uint64_t n = 0;  // the index passed in (j for expression 3)
  InvariantEstimate estimate;
  std::optional<HPReal> delta;
  /// First-order Richardson in 1/T_n from this row and the previous one.
  std::optional<HPReal> richardson;
};

struct ConvergenceTable {
  Method method = Method::Expr1Limit;
  std::vector<ConvergenceRow> rows;
  /// Full-table extrapolation in 1/T_n (needs >= 2 rows).
  std::optional<Extrapolation> limit;

  bool deltas_decrease() const;
};

/// Errors: Config if the list is not strictly ascending or the method is not
/// a geodesic method; propagated numeric errors.
ConvergenceTable converge(const LengthOneField& field, const PrincipalConductor& nu, Method method,
                          const std::vector<std::uint64_t>& n_list, const EvalOptions& options = {});

/// Ascending indices first..last, stopping before the first whose planned
/// factor count exceeds the budget.
std::vector<std::uint64_t> indices_within_budget(const LengthOneField& field, const PrincipalConductor& nu,
                                                 Method method, std::uint64_t first, std::uint64_t last,
                                                 const EvalOptions& options = {});

nlohmann::json to_json(const ConvergenceTable& table);

/// Machine-readable comparison of expression 2 in paper_literal mode with
/// the expression 1 limit for a rational conductor.
nlohmann::json literal_discrepancy_report(const LengthOneField& field, const PrincipalConductor& nu,
                                          const std::vector<std::uint64_t>& n_list, const EvalOptions& options = {});

/// prod_{r=0}^{T_n} [sin^2(π u_r) + sinh^2(π sqrt(d) v_r)] with
/// u_r = r(T_{n+1}/T_n + 1/m), v_r = r/T_n + k.
struct ChallengeValue {
  HPReal value;
  /// Absent when a factor vanishes (k = 0 makes the r = 0 factor zero).
  std::optional<HPReal> log_value;
  /// Sum of logs over the non-vanishing factors.
  HPReal log_nonvanishing;
  std::uint64_t vanishing_factors = 0;
  std::uint64_t factors = 0;
};

/// Errors: Domain for m < 1; BudgetExceeded above options.factor_budget.
ChallengeValue challenge_product(const LengthOneField& field, long m, std::uint64_t k, std::uint64_t n,
                                 const EvalOptions& options = {});
/// The same product written with -cos^2(π u) + cosh^2(π sqrt(d) v).
ChallengeValue challenge_product_cosh(const LengthOneField& field, long m, std::uint64_t k, std::uint64_t n,
                                      const EvalOptions& options = {});

/// sin(n x) = 2^{n-1} prod_{r<n} sin(rπ/n + x), checked to 2^{20-precision}
/// relative to max(1, |sin n x|).
struct SineIdentityResult {
  bool holds = false;
  HPReal lhs;
  HPReal rhs;
};
SineIdentityResult sine_identity_check(std::uint64_t n, const HPReal& x, int precision);

}  // namespace shintani
