#include "shintani/cone_decomposition.hpp"

#include <set>

namespace shintani {

BigRational angle_fraction(const BigRational& r) {
  BigRational f = fractional_part(r);
  return f == 0 ? BigRational(1) : f;
}

BigRational brace_fraction(const BigRational& r) { return fractional_part(r); }

ConePair initial_pair(const LengthOneField& field, const PrincipalConductor& nu) {
  // mu = P + Q·sqrt d and eps = a/2 + sqrt(d)/2, so X = 2Q and Y = P - a·Q.
  FieldElement mu = nu.mu();
  BigRational x = 2 * mu.q();
  BigRational y = mu.p() - BigRational(field.a()) * mu.q();
  x.canonicalize();
  y.canonicalize();
  return {angle_fraction(x), brace_fraction(y)};
}

ConePair step(const ConePair& pair, long a) {
  BigRational x = BigRational(a) * pair.x + pair.y;
  x.canonicalize();
  BigRational y = 1 - pair.x;
  y.canonicalize();
  return {angle_fraction(x), brace_fraction(y)};
}

DecompositionDatum decomposition(const LengthOneField& field, const PrincipalConductor& nu) {
  std::uint64_t g = unit_order(field, nu);
  const ConePair start = initial_pair(field, nu);

  std::vector<ConeDatum> data;
  data.reserve(g);
  std::set<std::pair<std::string, std::string>> seen;
  ConePair current = start;
  for (std::uint64_t i = 0; i < g; ++i) {
    if (!seen.emplace(to_string(current.x), to_string(current.y)).second) {
      fail(ErrorKind::PeriodMismatch, "orbit of " + to_string(start.x) + ", " + to_string(start.y) +
                                          " repeats after " + std::to_string(i) + " < g = " + std::to_string(g) +
                                          " steps");
    }
    data.push_back({i == 0 ? g : i, current.x, current.y});
    current = step(current, field.a());
  }
  if (!(current == start)) {
    fail(ErrorKind::PeriodMismatch, "g = " + std::to_string(g) + " steps do not return to the initial pair");
  }
  return DecompositionDatum{field, nu, g, std::move(data)};
}

HPReal z_of(const ConeDatum& entry, const LengthOneField& field, int precision) {
  HPReal sqrt_d = sqrt(HPReal(field.d(), precision + 8));
  HPReal eps = (HPReal(field.a(), precision + 8) + sqrt_d) / 2;
  return (HPReal(entry.x, precision + 8) * eps + HPReal(entry.y, precision + 8)).with_precision(precision);
}

bool satisfies_membership(const DecompositionDatum& datum, const ConeDatum& entry) {
  const LengthOneField& field = datum.field;
  // eps^(-k) = eps'^k
  FieldElement scale = field.rational(1);
  for (std::uint64_t i = 0; i < entry.k; ++i) scale = scale * field.epsilon_conjugate();
  FieldElement point = field.element(entry.x, 0) * field.epsilon() + field.element(entry.y, 0);
  FieldElement diff = scale * point - datum.conductor.mu();
  return diff.is_integral();
}

nlohmann::json decomposition_to_json(const DecompositionDatum& datum) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const ConeDatum& c : datum.data) {
    pairs.push_back({c.x.get_num().get_si(), c.x.get_den().get_si(), c.y.get_num().get_si(), c.y.get_den().get_si()});
  }
  return {
      {"a", datum.field.a()},
      {"d", datum.field.d()},
      {"nu", datum.conductor.to_string()},
      {"g", datum.g},
      {"pairs", pairs},
  };
}

}  // namespace shintani
