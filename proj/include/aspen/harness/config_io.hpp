#pragma once

#include "aspen/harness/problem_spec.hpp"
#include "aspen/solver.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace aspen::harness {

/// Schema violation in a configuration document. The message carries the
/// JSON path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

Json to_json(const SolverConfig& config);
Json to_json(const ProblemSpec& spec);

/// `base` supplies every field that `j` omits. Unknown keys are rejected.
SolverConfig solver_config_from_json(const Json& j, const SolverConfig& base, const std::string& where = "solver");
ProblemSpec problem_spec_from_json(const Json& j, const std::string& where = "problem");

Method parse_method(const std::string& name);

/// Parses a JSON document; syntax errors become ConfigError naming `source`.
Json parse_json_document(const std::string& text, const std::string& source);

}  // namespace aspen::harness
