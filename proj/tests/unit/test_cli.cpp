#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "shintani/cli.hpp"
#include "shintani/invariants.hpp"

using namespace shintani;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "shintani");
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<nlohmann::json> lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

}  // namespace

TEST_CASE("index ranges") {
  CHECK(cli::parse_index_range("7") == std::vector<std::uint64_t>{7});
  CHECK(cli::parse_index_range("2..4") == std::vector<std::uint64_t>{2, 3, 4});
  CHECK_THROWS_AS(cli::parse_index_range("4..2"), ParseError);
  CHECK_THROWS_AS(cli::parse_index_range("a..2"), ParseError);
  CHECK_THROWS_AS(cli::parse_index_range("-1"), ParseError);
}

TEST_CASE("exit code mapping") {
  CHECK(cli::exit_code(ErrorKind::EvenDigit) == 2);
  CHECK(cli::exit_code(ErrorKind::ConductorNotRational) == 2);
  CHECK(cli::exit_code(ErrorKind::Parse) == 2);
  CHECK(cli::exit_code(ErrorKind::BudgetExceeded) == 3);
  CHECK(cli::exit_code(ErrorKind::SlowConvergence) == 3);
  CHECK(cli::exit_code(ErrorKind::InsufficientPrecision) == 3);
}

TEST_CASE("field") {
  Run r = run({"field", "--a", "3", "--modulus", "4", "--json"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["d"] == 5);
  CHECK(j["conductor"]["g"] == 3);
  CHECK(j["conductor"]["pairs"][1] == nlohmann::json({1, 4, 0, 1}));

  Run ideal = run({"field", "--a", "3", "--ideal", "4-1*sqrt(5)"});
  CHECK(ideal.code == 0);
  CHECK(ideal.out.find("(2/11, 1/11)") != std::string::npos);
  CHECK(ideal.out.find("(10/11, 5/11)") != std::string::npos);

  Run even = run({"field", "--a", "4"});
  CHECK(even.code == 2);
  CHECK(even.err.find("EvenDigit") != std::string::npos);

  CHECK(run({"field", "--a", "3", "--d", "5"}).code == 2);
  CHECK(run({"field"}).code == 2);
  CHECK(run({"field", "--a", "three"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cone") {
  Run r = run({"cone", "--d", "21", "--m", "3", "--json"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["g"] == 3);
  for (const auto& c : j["cones"]) CHECK(c["member"] == true);
  CHECK(run({"cone", "--a", "3"}).code == 2);
}

TEST_CASE("invariant records") {
  Run r = run({"invariant", "--a", "3", "--ideal", "4-1*sqrt(5)", "--method", "expr1", "--n", "0..2", "--precision",
               "128", "--json"});
  REQUIRE(r.code == 0);
  auto recs = lines(r.out);
  REQUIRE(recs.size() == 3);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    InvariantEstimate e = estimate_from_json(recs[i]);
    CHECK(e.n == i);
    CHECK(e.method == Method::Expr1Limit);
    CHECK(e.g == 5);
  }

  Run full = run({"invariant", "--a", "3", "--m", "4", "--method", "full", "--precision", "128", "--json"});
  REQUIRE(full.code == 0);
  auto three = lines(full.out);
  REQUIRE(three.size() == 3);
  CHECK(three[2]["method"] == "XProduct");

  Run bad = run({"invariant", "--method", "expr2", "--a", "3", "--ideal", "4-1*sqrt(5)", "--n", "1"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("ConductorNotRational") != std::string::npos);

  Run budget = run({"invariant", "--a", "3", "--m", "4", "--n", "12", "--precision", "128"});
  CHECK(budget.code == 3);
  CHECK(budget.err.find("BudgetExceeded") != std::string::npos);

  CHECK(run({"invariant", "--a", "3", "--m", "4", "--n", "1", "--precision", "32"}).code == 2);
  CHECK(run({"invariant", "--a", "3", "--m", "4", "--method", "expr1"}).code == 2);
  CHECK(run({"invariant", "--a", "3", "--m", "4", "--n", "1", "--mode", "sideways"}).code == 2);
}

TEST_CASE("converge and the literal report") {
  Run r = run({"converge", "--a", "3", "--m", "4", "--method", "expr2", "--n", "0..3", "--precision", "128", "--json"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["rows"].size() == 4);

  std::string path = "cli_literal_report.json";
  Run rep = run({"converge", "--a", "3", "--m", "4", "--n", "0..3", "--literal-report", "--precision", "128", "--json",
                 "--out", path});
  REQUIRE(rep.code == 0);
  CHECK(rep.out.empty());
  std::ifstream in(path);
  auto report = nlohmann::json::parse(in);
  CHECK(report.contains("verdict"));
  std::remove(path.c_str());
}

TEST_CASE("recognize") {
  Run r = run({"recognize", "--value", "0.5", "--precision", "128", "--json"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["relation"]["polynomial"] == "2*X - 1");

  Run none = run({"recognize", "--value", "2.2360679774997896964091736687312762354406183596115257242708972454105",
                  "--max-degree", "1", "--precision", "256", "--json"});
  REQUIRE(none.code == 0);
  CHECK(nlohmann::json::parse(none.out)["relation"].is_null());

  Run quartic = run({"recognize", "--a", "3", "--ideal", "4-1*sqrt(5)", "--precision", "192", "--json"});
  REQUIRE(quartic.code == 0);
  CHECK(nlohmann::json::parse(quartic.out)["relation"]["polynomial"] == "X^4 - 3*X^3 + 3*X^2 - 3*X + 1");

  CHECK(run({"recognize", "--value", "1.4142135623730950488", "--precision", "64"}).code == 3);
}

TEST_CASE("challenge") {
  Run r = run({"challenge", "--a", "3", "--m", "4", "--k", "0", "--n", "1..6", "--precision", "128", "--json"});
  REQUIRE(r.code == 0);
  auto recs = lines(r.out);
  REQUIRE(recs.size() == 6);
  double last = -1e300;
  for (const auto& rec : recs) {
    CHECK(rec["vanishing_factors"] == 1);
    CHECK(rec["log_dec"].is_null());
    double lp = std::stod(rec["log_nonvanishing_dec"].get<std::string>());
    CHECK(lp > last);
    last = lp;
  }
  CHECK(run({"challenge", "--a", "3", "--k", "0", "--n", "1"}).code == 2);
  CHECK(run({"challenge", "--a", "3", "--m", "0", "--k", "0", "--n", "1"}).code == 2);
}
