#include "shintani/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "shintani/chebyshev_geodesic.hpp"
#include "shintani/cone_decomposition.hpp"
#include "shintani/invariants.hpp"
#include "shintani/recognition.hpp"

namespace shintani::cli {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Config:
    case ErrorKind::Domain:
    case ErrorKind::Precision:
    case ErrorKind::NotSquareFree:
    case ErrorKind::EvenDigit:
    case ErrorKind::NonIntegral:
    case ErrorKind::ZeroConductor:
    case ErrorKind::UnitConductor:
    case ErrorKind::ConductorNotRational:
      return kExitConfig;
    default:
      return kExitNumeric;
  }
}

std::vector<std::uint64_t> parse_index_range(const std::string& text) {
  auto parse_one = [&](const std::string& part, std::size_t offset) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError(offset, "expected a non-negative integer in index range '" + text + "'");
    }
    return static_cast<std::uint64_t>(std::stoull(part));
  };
  std::size_t dots = text.find("..");
  if (dots == std::string::npos) return {parse_one(text, 0)};
  std::uint64_t lo = parse_one(text.substr(0, dots), 0);
  std::uint64_t hi = parse_one(text.substr(dots + 2), dots + 2);
  if (hi < lo) throw ParseError(dots, "empty index range '" + text + "'");
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

namespace {

struct Config {
  std::optional<long> a;
  std::optional<long> d;
  std::optional<long> modulus;
  std::optional<std::string> ideal;
  int precision = kDefaultPrecision;
  std::optional<int> tail_bits;
  bool json = false;
  std::string out_path;
  std::string method = "expr1";
  std::string n_range;
  std::string mode = "derived";
  std::size_t anchor = 0;
  std::optional<std::uint64_t> k_max;
  std::uint64_t k = 0;
  int max_degree = 4;
  long max_height = 100;
  std::string tol = "1e-20";
  std::optional<std::string> value;
  bool literal_report = false;
};

void add_field_options(CLI::App* sub, Config& cfg) {
  sub->add_option("--a", cfg.a, "length-one digit a (d = a^2 - 4)");
  sub->add_option("--d", cfg.d, "discriminant radicand d (d + 4 must be a square)");
}

void add_conductor_options(CLI::App* sub, Config& cfg) {
  sub->add_option("--modulus,--m", cfg.modulus, "rational conductor m");
  sub->add_option("--ideal", cfg.ideal, "principal conductor, e.g. \"4-1*sqrt(5)\"");
}

void add_common_options(CLI::App* sub, Config& cfg) {
  sub->add_option("--precision", cfg.precision, "working precision in bits")->capture_default_str();
  sub->add_option("--tail-bits", cfg.tail_bits, "truncation tolerance 2^-bits (default precision/4)");
  sub->add_flag("--json", cfg.json, "emit JSON");
  sub->add_option("--out", cfg.out_path, "write results to FILE");
}

LengthOneField field_of(const Config& cfg) {
  if (cfg.a.has_value() == cfg.d.has_value()) fail(ErrorKind::Config, "give exactly one of --a and --d");
  return cfg.a ? make_field(*cfg.a) : field_from_discriminant(*cfg.d);
}

std::optional<PrincipalConductor> conductor_of(const Config& cfg, const LengthOneField& field) {
  if (cfg.modulus && cfg.ideal) fail(ErrorKind::Config, "give at most one of --modulus and --ideal");
  if (cfg.modulus) return rational_conductor(field, *cfg.modulus);
  if (cfg.ideal) return make_conductor(field, parse_ideal_expression(*cfg.ideal, field.d()));
  return std::nullopt;
}

PrincipalConductor require_conductor(const Config& cfg, const LengthOneField& field) {
  auto c = conductor_of(cfg, field);
  if (!c) fail(ErrorKind::Config, "a conductor is required (--modulus or --ideal)");
  return *c;
}

EvalOptions eval_options(const Config& cfg) {
  check_precision(cfg.precision);
  EvalOptions o;
  o.precision = cfg.precision;
  o.tail_bits = cfg.tail_bits;
  o.mode = parse_expr2_mode(cfg.mode);
  o.anchor = cfg.anchor;
  o.k_max = cfg.k_max;
  return o;
}

std::string epsilon_exact(const LengthOneField& f) {
  return "(" + std::to_string(f.a()) + "+sqrt(" + std::to_string(f.d()) + "))/2";
}

// ------------------------------------------------------------- commands

void cmd_field(const Config& cfg, std::ostream& out) {
  LengthOneField field = field_of(cfg);
  FieldConstants c(field, cfg.precision);
  auto conductor = conductor_of(cfg, field);
  if (cfg.json) {
    nlohmann::json j = {{"a", field.a()},
                        {"d", field.d()},
                        {"epsilon", {{"exact", epsilon_exact(field)}, {"dec", c.epsilon.to_decimal()}}},
                        {"precision_bits", cfg.precision}};
    if (conductor) {
      DecompositionDatum datum = decomposition(field, *conductor);
      j["conductor"] = decomposition_to_json(datum);
      j["conductor"]["norm"] = conductor->norm().get_str();
    }
    out << j.dump() << '\n';
    return;
  }
  out << "a       " << field.a() << '\n'
      << "d       " << field.d() << '\n'
      << "eps     " << epsilon_exact(field) << " = " << c.epsilon.to_decimal(40) << '\n';
  if (!conductor) return;
  DecompositionDatum datum = decomposition(field, *conductor);
  out << "nu      " << conductor->to_string() << "  (norm " << conductor->norm().get_str() << ")\n"
      << "g       " << datum.g << '\n';
  for (const ConeDatum& e : datum.data) {
    out << "  k=" << e.k << "  (" << to_string(e.x) << ", " << to_string(e.y) << ")\n";
  }
}

void cmd_cone(const Config& cfg, std::ostream& out) {
  LengthOneField field = field_of(cfg);
  PrincipalConductor nu = require_conductor(cfg, field);
  DecompositionDatum datum = decomposition(field, nu);
  ConePair start = initial_pair(field, nu);
  nlohmann::json rows = nlohmann::json::array();
  for (const ConeDatum& e : datum.data) {
    rows.push_back({{"k", e.k},
                    {"x", to_string(e.x)},
                    {"y", to_string(e.y)},
                    {"z_dec", z_of(e, field, cfg.precision).to_decimal()},
                    {"member", satisfies_membership(datum, e)}});
  }
  if (cfg.json) {
    out << nlohmann::json{{"a", field.a()},
                          {"d", field.d()},
                          {"nu", nu.to_string()},
                          {"mu", nu.mu().to_string()},
                          {"g", datum.g},
                          {"initial", {to_string(start.x), to_string(start.y)}},
                          {"cones", rows}}
               .dump()
        << '\n';
    return;
  }
  out << "nu = " << nu.to_string() << ", mu = 1/nu = " << nu.mu().to_string() << ", g = " << datum.g << '\n';
  for (const auto& r : rows) {
    out << "  k=" << r["k"].get<std::uint64_t>() << "  x=" << r["x"].get<std::string>()
        << "  y=" << r["y"].get<std::string>() << "  z=" << r["z_dec"].get<std::string>().substr(0, 24)
        << (r["member"].get<bool>() ? "" : "  MEMBERSHIP FAILS") << '\n';
  }
}

void print_estimate(const InvariantEstimate& e, bool json, std::ostream& out) {
  if (json) {
    out << to_json(e).dump() << '\n';
    return;
  }
  out << std::left << std::setw(15) << to_string(e.method) << " n=" << std::setw(4) << e.n << ' '
      << e.value.to_decimal(30) << "  err~" << e.err_est.to_decimal(3) << "  (" << e.factors << " factors, "
      << std::fixed << std::setprecision(1) << e.wall_ms << " ms)" << std::defaultfloat << '\n';
}

void cmd_invariant(const Config& cfg, std::ostream& out) {
  LengthOneField field = field_of(cfg);
  PrincipalConductor nu = require_conductor(cfg, field);
  EvalOptions options = eval_options(cfg);
  if (cfg.method == "full") {
    InvariantEstimate x1 = x1_generic(field, nu, options);
    InvariantEstimate x2 = x2_generic(field, nu, options);
    for (const auto& e : {x1, x2, x_product(x1, x2)}) print_estimate(e, cfg.json, out);
    return;
  }
  Method method = parse_method(cfg.method);
  if (!is_geodesic(method)) {
    if (method == Method::X1Generic) print_estimate(x1_generic(field, nu, options), cfg.json, out);
    if (method == Method::X2Generic) print_estimate(x2_generic(field, nu, options), cfg.json, out);
    if (method == Method::XProduct) {
      print_estimate(x_product(x1_generic(field, nu, options), x2_generic(field, nu, options)), cfg.json, out);
    }
    return;
  }
  if (cfg.n_range.empty()) fail(ErrorKind::Config, "--n is required for " + cfg.method);
  std::optional<HPReal> previous;
  for (std::uint64_t n : parse_index_range(cfg.n_range)) {
    InvariantEstimate e = estimate(field, nu, method, n, options);
    if (previous) e.err_est = max(e.err_est, abs(e.value - *previous));
    previous = e.value;
    print_estimate(e, cfg.json, out);
    out.flush();
  }
}

void cmd_converge(const Config& cfg, std::ostream& out) {
  LengthOneField field = field_of(cfg);
  PrincipalConductor nu = require_conductor(cfg, field);
  EvalOptions options = eval_options(cfg);
  if (cfg.n_range.empty()) fail(ErrorKind::Config, "--n is required");
  std::vector<std::uint64_t> ns = parse_index_range(cfg.n_range);
  if (cfg.literal_report) {
    out << literal_discrepancy_report(field, nu, ns, options).dump(cfg.json ? -1 : 2) << '\n';
    return;
  }
  ConvergenceTable table = converge(field, nu, parse_method(cfg.method), ns, options);
  if (cfg.json) {
    out << to_json(table).dump() << '\n';
    return;
  }
  out << to_string(table.method) << '\n';
  for (const ConvergenceRow& row : table.rows) {
    out << "  n=" << std::left << std::setw(4) << row.n << ' ' << row.estimate.value.to_decimal(25)
        << "  delta=" << (row.delta ? row.delta->to_decimal(3) : std::string("-"))
        << "  richardson=" << (row.richardson ? row.richardson->to_decimal(15) : std::string("-")) << '\n';
  }
  if (table.limit) {
    out << "limit " << table.limit->value.to_decimal(25) << "  err~" << table.limit->err_est.to_decimal(3)
        << "  (order " << table.limit->order << ")\n";
  }
}

void cmd_recognize(const Config& cfg, std::ostream& out) {
  std::optional<InvariantEstimate> source;
  HPReal x(cfg.precision);
  if (cfg.value) {
    check_precision(cfg.precision);
    x = HPReal(*cfg.value, cfg.precision);
  } else {
    LengthOneField field = field_of(cfg);
    PrincipalConductor nu = require_conductor(cfg, field);
    EvalOptions options = eval_options(cfg);
    Method method = parse_method(cfg.method == "expr1" ? "x1" : cfg.method);
    if (method == Method::X1Generic) {
      source = x1_generic(field, nu, options);
    } else if (method == Method::X2Generic) {
      source = x2_generic(field, nu, options);
    } else if (method == Method::XProduct) {
      source = x_product(x1_generic(field, nu, options), x2_generic(field, nu, options));
    } else {
      fail(ErrorKind::Config, "recognize evaluates x1, x2 or x; pass --value to recognize a number");
    }
    x = source->value;
  }
  HPReal tol(cfg.tol, cfg.precision);
  auto relation = recognize_minpoly(x, cfg.max_degree, BigInt(cfg.max_height), tol);
  nlohmann::json j = {{"value_dec", x.to_decimal()},
                      {"precision_bits", cfg.precision},
                      {"max_degree", cfg.max_degree},
                      {"max_height", cfg.max_height},
                      {"tol_dec", tol.to_decimal(6)},
                      {"relation", relation ? to_json(*relation) : nlohmann::json(nullptr)}};
  if (source) j["estimate"] = to_json(*source);
  if (cfg.json) {
    out << j.dump() << '\n';
    return;
  }
  out << "x = " << x.to_decimal(40) << '\n';
  if (!relation) {
    out << "no relation with degree <= " << cfg.max_degree << " and height <= " << cfg.max_height << '\n';
    return;
  }
  out << polynomial_to_string(relation->coefficients) << "  (residual " << relation->residual.to_decimal(3)
      << ")\n";
}

void cmd_challenge(const Config& cfg, std::ostream& out) {
  LengthOneField field = field_of(cfg);
  if (!cfg.modulus) fail(ErrorKind::Config, "--m is required");
  if (cfg.n_range.empty()) fail(ErrorKind::Config, "--n is required");
  EvalOptions options = eval_options(cfg);
  for (std::uint64_t n : parse_index_range(cfg.n_range)) {
    ChallengeValue v = challenge_product(field, *cfg.modulus, cfg.k, n, options);
    if (cfg.json) {
      out << nlohmann::json{{"a", field.a()},
                            {"d", field.d()},
                            {"m", *cfg.modulus},
                            {"k", cfg.k},
                            {"n", n},
                            {"T_n", cheb(field.a(), n).get_str()},
                            {"factors", v.factors},
                            {"precision_bits", cfg.precision},
                            {"value_dec", v.value.to_decimal()},
                            {"log_dec", v.log_value ? nlohmann::json(v.log_value->to_decimal()) : nlohmann::json()},
                            {"log_nonvanishing_dec", v.log_nonvanishing.to_decimal()},
                            {"vanishing_factors", v.vanishing_factors}}
                 .dump()
          << '\n';
    } else {
      out << "n=" << std::left << std::setw(4) << n << " P=" << v.value.to_decimal(20)
          << "  log P=" << (v.log_value ? v.log_value->to_decimal(20) : std::string("-inf"))
          << "  log P'=" << v.log_nonvanishing.to_decimal(20) << "  zero factors=" << v.vanishing_factors << '\n';
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Shintani invariants of real quadratic fields with length-one minus continued fraction",
               args.empty() ? "shintani" : args[0]};
  app.require_subcommand(1);

  CLI::App* field = app.add_subcommand("field", "field data and, with a conductor, the cone decomposition");
  add_field_options(field, cfg);
  add_conductor_options(field, cfg);
  add_common_options(field, cfg);

  CLI::App* cone = app.add_subcommand("cone", "cone decomposition with membership checks");
  add_field_options(cone, cfg);
  add_conductor_options(cone, cfg);
  add_common_options(cone, cfg);

  CLI::App* invariant = app.add_subcommand("invariant", "estimate X_1, X_2 or X");
  add_field_options(invariant, cfg);
  add_conductor_options(invariant, cfg);
  add_common_options(invariant, cfg);
  invariant->add_option("--method", cfg.method, "expr1|expr2|expr3|dsine|x1|x2|full")->capture_default_str();
  invariant->add_option("--n", cfg.n_range, "geodesic index or range lo..hi (j for expr3)");
  invariant->add_option("--mode", cfg.mode, "expr2 indexing: derived|paper_literal")->capture_default_str();
  invariant->add_option("--anchor", cfg.anchor, "cone pair anchoring expr1")->capture_default_str();
  invariant->add_option("--k-max", cfg.k_max, "expr3 layer count");

  CLI::App* conv = app.add_subcommand("converge", "convergence table with extrapolation");
  add_field_options(conv, cfg);
  add_conductor_options(conv, cfg);
  add_common_options(conv, cfg);
  conv->add_option("--method", cfg.method, "expr1|expr2|expr3|dsine")->capture_default_str();
  conv->add_option("--n", cfg.n_range, "index range lo..hi");
  conv->add_option("--mode", cfg.mode, "expr2 indexing: derived|paper_literal")->capture_default_str();
  conv->add_option("--anchor", cfg.anchor, "cone pair anchoring expr1")->capture_default_str();
  conv->add_option("--k-max", cfg.k_max, "expr3 layer count");
  conv->add_flag("--literal-report", cfg.literal_report, "compare expr2 paper_literal with the expr1 limit");

  CLI::App* recognize = app.add_subcommand("recognize", "minimal-polynomial candidate for an invariant");
  add_field_options(recognize, cfg);
  add_conductor_options(recognize, cfg);
  add_common_options(recognize, cfg);
  recognize->add_option("--method", cfg.method, "x1|x2|x")->default_str("x1");
  recognize->add_option("--value", cfg.value, "recognize this decimal instead");
  recognize->add_option("--max-degree", cfg.max_degree)->capture_default_str();
  recognize->add_option("--max-height", cfg.max_height)->capture_default_str();
  recognize->add_option("--tol", cfg.tol, "residual bound")->capture_default_str();

  CLI::App* chall = app.add_subcommand("challenge", "the open-problem product over r = 0..T_n");
  add_field_options(chall, cfg);
  chall->add_option("--modulus,--m", cfg.modulus, "m");
  chall->add_option("--k", cfg.k, "layer k")->capture_default_str();
  chall->add_option("--n", cfg.n_range, "index or range lo..hi");
  add_common_options(chall, cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::ostringstream buffer;
  std::ofstream file;
  std::ostream* sink = &out;
  try {
    if (!cfg.out_path.empty()) {
      file.open(cfg.out_path);
      if (!file) fail(ErrorKind::Config, "cannot open " + cfg.out_path + " for writing");
      sink = &file;
    }
    if (field->parsed()) cmd_field(cfg, *sink);
    if (cone->parsed()) cmd_cone(cfg, *sink);
    if (invariant->parsed()) cmd_invariant(cfg, *sink);
    if (conv->parsed()) cmd_converge(cfg, *sink);
    if (recognize->parsed()) cmd_recognize(cfg, *sink);
    if (chall->parsed()) cmd_challenge(cfg, *sink);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return kExitOk;
}

}  // namespace shintani::cli
