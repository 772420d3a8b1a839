#include "aspen/harness/config_io.hpp"

#include <fmt/format.h>

#include <set>

namespace aspen::harness {
namespace {

void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      std::string known;
      for (const auto& k : allowed) known += (known.empty() ? "" : ", ") + k;
      throw ConfigError(fmt::format("{}: unknown key '{}' (known keys: {})", where, key, known));
    }
  }
}

template <typename T>
void read_field(const Json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("{}.{}: wrong type ({})", where, key, it->type_name()));
  }
}

Json growth_to_json(const GrowthRule& g) {
  Json j;
  switch (g.kind) {
    case GrowthKind::IncrementByOne: j["kind"] = "increment"; break;
    case GrowthKind::MultiplyCeil:
      j["kind"] = "multiply_ceil";
      j["factor"] = g.factor;
      break;
    case GrowthKind::JumpToFull: j["kind"] = "jump_to_full"; break;
  }
  return j;
}

GrowthRule growth_from_json(const Json& j, GrowthRule base, const std::string& where) {
  reject_unknown_keys(j, {"kind", "factor"}, where);
  std::string kind;
  read_field(j, "kind", kind, where);
  if (kind == "increment") {
    base = GrowthRule::increment();
  } else if (kind == "multiply_ceil") {
    base = GrowthRule::multiply_ceil(base.kind == GrowthKind::MultiplyCeil ? base.factor : 1.1);
  } else if (kind == "jump_to_full") {
    base = GrowthRule::jump_to_full();
  } else if (!kind.empty()) {
    throw ConfigError(where + ".kind: expected increment, multiply_ceil or jump_to_full, got '" + kind + "'");
  }
  read_field(j, "factor", base.factor, where);
  return base;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "aspen") return Method::Aspen;
  if (name == "full") return Method::Full;
  if (name == "heur") return Method::Heur;
  throw ConfigError("unknown method '" + name + "' (expected aspen, full or heur)");
}

Json to_json(const SolverConfig& c) {
  Json j;
  j["mu0"] = c.mu0;
  j["n0"] = c.n0;
  j["c"] = c.c;
  j["C"] = c.C;
  j["gamma"] = c.gamma;
  j["d_size"] = c.d_size;
  j["growth"] = growth_to_json(c.growth);
  j["heur_growth"] = growth_to_json(c.heur_growth);
  j["line_search"] = {{"beta", c.line_search.beta}, {"eta", c.line_search.eta}, {"j_max", c.line_search.j_max}};
  j["epsilon_exponent"] = c.epsilon.exponent;
  j["budget_fev"] = c.budget_fev;
  if (c.budget_iters == std::numeric_limits<std::uint64_t>::max()) {
    j["budget_iters"] = nullptr;
  } else {
    j["budget_iters"] = c.budget_iters;
  }
  j["seed"] = c.seed;
  if (c.kkt_tol) {
    j["kkt_tol"] = *c.kkt_tol;
  } else {
    j["kkt_tol"] = nullptr;
  }
  return j;
}

SolverConfig solver_config_from_json(const Json& j, const SolverConfig& base, const std::string& where) {
  reject_unknown_keys(j,
                      {"mu0", "n0", "c", "C", "gamma", "d_size", "growth", "heur_growth", "line_search",
                       "epsilon_exponent", "budget_fev", "budget_iters", "seed", "kkt_tol"},
                      where);
  SolverConfig c = base;
  read_field(j, "mu0", c.mu0, where);
  read_field(j, "n0", c.n0, where);
  read_field(j, "c", c.c, where);
  read_field(j, "C", c.C, where);
  read_field(j, "gamma", c.gamma, where);
  read_field(j, "d_size", c.d_size, where);
  if (j.contains("growth")) c.growth = growth_from_json(j["growth"], c.growth, where + ".growth");
  if (j.contains("heur_growth")) {
    c.heur_growth = growth_from_json(j["heur_growth"], c.heur_growth, where + ".heur_growth");
  }
  if (j.contains("line_search")) {
    const auto& ls = j["line_search"];
    const std::string sub = where + ".line_search";
    reject_unknown_keys(ls, {"beta", "eta", "j_max"}, sub);
    read_field(ls, "beta", c.line_search.beta, sub);
    read_field(ls, "eta", c.line_search.eta, sub);
    read_field(ls, "j_max", c.line_search.j_max, sub);
  }
  read_field(j, "epsilon_exponent", c.epsilon.exponent, where);
  read_field(j, "budget_fev", c.budget_fev, where);
  if (j.contains("budget_iters")) {
    if (j["budget_iters"].is_null()) {
      c.budget_iters = std::numeric_limits<std::uint64_t>::max();
    } else {
      read_field(j, "budget_iters", c.budget_iters, where);
    }
  }
  read_field(j, "seed", c.seed, where);
  if (j.contains("kkt_tol")) {
    if (j["kkt_tol"].is_null()) {
      c.kkt_tol.reset();
    } else {
      double tol = 0.0;
      read_field(j, "kkt_tol", tol, where);
      c.kkt_tol = tol;
    }
  }
  return c;
}

Json to_json(const ProblemSpec& s) {
  Json j;
  if (s.kind == ProblemKind::Logistic) {
    j["kind"] = "logistic";
    j["path"] = s.path;
    j["unit_norm"] = s.unit_norm;
  } else {
    j["kind"] = "hs24";
    j["n"] = s.n_components;
    j["sigma"] = s.sigma;
    j["noise_seed"] = s.noise_seed;
  }
  return j;
}

ProblemSpec problem_spec_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(where + ": missing 'kind' (logistic or hs24)");
  std::string kind;
  read_field(j, "kind", kind, where);
  ProblemSpec s;
  if (kind == "logistic") {
    reject_unknown_keys(j, {"kind", "path", "unit_norm"}, where);
    if (!j.contains("path")) throw ConfigError(where + ".path: required for logistic problems");
    s.kind = ProblemKind::Logistic;
    read_field(j, "path", s.path, where);
    read_field(j, "unit_norm", s.unit_norm, where);
  } else if (kind == "hs24") {
    reject_unknown_keys(j, {"kind", "n", "sigma", "noise_seed"}, where);
    s.kind = ProblemKind::Hs24;
    read_field(j, "n", s.n_components, where);
    read_field(j, "sigma", s.sigma, where);
    read_field(j, "noise_seed", s.noise_seed, where);
    if (s.n_components < 1) throw ConfigError(where + ".n: must be >= 1");
    if (!(s.sigma >= 0.0)) throw ConfigError(where + ".sigma: must be >= 0");
  } else {
    throw ConfigError(where + ".kind: expected logistic or hs24, got '" + kind + "'");
  }
  return s;
}

Json parse_json_document(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ": invalid JSON: " + e.what());
  }
}

}  // namespace aspen::harness
