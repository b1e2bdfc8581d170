#include "driftlab/report.hpp"

#include <cmath>
#include <cstdio>

namespace driftlab {

using nlohmann::json;

namespace {

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

json pairs(const std::vector<std::pair<double, double>>& v) {
  json a = json::array();
  for (const auto& [x, y] : v) a.push_back({json_number(x), json_number(y)});
  return a;
}

}  // namespace

json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json to_json(const SolveReport& r) {
  return {{"truncation_levels", numbers(r.truncation_levels)},
          {"increments", numbers(r.increments)},
          {"h1_norms", numbers(r.h1_norms)},
          {"apriori_bounds", numbers(r.apriori_bounds)},
          {"linear_residuals", numbers(r.linear_residuals)},
          {"iterations", r.iterations},
          {"bracket_uu", json_number(r.bracket_uu)},
          {"energy_defect", json_number(r.energy_defect)},
          {"poincare_constant", json_number(r.poincare_constant)},
          {"converged", r.converged}};
}

json to_json(const NormReport& r) {
  json criteria = json::object();
  for (const auto& [name, v] : r.criteria) {
    json entry = {{"verdict", verdict_name(v)}};
    if (auto it = r.evidence.find(name); it != r.evidence.end())
      entry["evidence"] = {json_number(it->second.first), json_number(it->second.second)};
    criteria[name] = entry;
  }
  json extra = json::object();
  for (const auto& [name, e] : r.evidence)
    if (!r.criteria.contains(name)) extra[name] = json_number(e.first);
  json profile = json::array();
  for (const auto& [d, v] : r.bmo_depth_profile) profile.push_back({d, json_number(v)});
  return {{"lp_samples", pairs(r.lp_samples)},
          {"growth_limit_L", json_number(r.growth_limit_L)},
          {"gamma_star", json_number(r.gamma_star)},
          {"bmo", json_number(r.bmo)},
          {"bmo_depth_profile", profile},
          {"morrey_n", json_number(r.morrey_n)},
          {"grand_lebesgue_n", json_number(r.grand_lebesgue_n)},
          {"weak_n", json_number(r.weak_n)},
          {"criteria", criteria},
          {"diagnostics", extra}};
}

json to_json(const CaccioppoliTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"lambda", json_number(r.lambda)},
                    {"lhs", json_number(r.lhs)},
                    {"lhs_core", json_number(r.lhs_core)},
                    {"interaction", json_number(r.interaction)},
                    {"identity_defect", json_number(r.identity_defect)},
                    {"rhs", json_number(r.rhs)},
                    {"rhs_effective", json_number(r.rhs_effective)},
                    {"holds", r.holds}});
  json weighted = json::array();
  for (const auto& w : t.weighted)
    weighted.push_back({{"epsilon", w[0]}, {"lhs", json_number(w[1])}, {"rhs", json_number(w[2])}});
  return {{"C", t.C}, {"rows", rows}, {"weighted", weighted}};
}

json to_json(const ZhikovLevel& l) {
  return {{"resolution", l.resolution},
          {"rho", l.rho},
          {"h", json_number(l.h)},
          {"bracket", json_number(l.bracket)},
          {"defect_candidate", json_number(l.defect_candidate)}};
}

json to_json(const ZhikovReport& r) {
  json trend = json::array();
  for (const auto& l : r.trend) trend.push_back(to_json(l));
  return {{"pair",
           {{"beta", r.pair.beta},
            {"mean_a0", json_number(r.pair.mean_a0)},
            {"moment_u0_a0", json_number(r.pair.moment_u0_a0)},
            {"moment_a0_u0u0", json_number(r.pair.moment_a0_u0u0)}}},
          {"main", to_json(r.main)},
          {"trend", trend},
          {"approximation", to_json(r.approximation)},
          {"approximation_gap", json_number(r.approximation_gap)},
          {"approximation_gap_coarse", json_number(r.approximation_gap_coarse)},
          {"drift_norms", to_json(r.drift_norms)},
          {"reproduced", r.reproduced},
          {"verdict", r.verdict}};
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string norms_table(const NormReport& r) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-14s %16s  %s\n", "criterion", "value", "verdict");
  out += line;
  for (const auto& [name, v] : r.criteria) {
    const double value = r.evidence.at(name).second;
    std::snprintf(line, sizeof line, "%-14s %16.6g  %s\n", name.c_str(), value, verdict_name(v));
    out += line;
  }
  return out;
}

}  // namespace driftlab
