#include "aspen/harness/experiment.hpp"

#include "aspen/harness/trace_io.hpp"
#include "aspen/init.hpp"

#include <fmt/format.h>

#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <thread>

#ifndef ASPEN_VERSION
#define ASPEN_VERSION "unknown"
#endif

namespace aspen::harness {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// Runs task(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& t : pool) t.join();
}

template <typename T>
std::vector<T> read_list(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return {};
  try {
    return j.at(key).get<std::vector<T>>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("{}.{}: expected a list", where, key));
  }
}

std::optional<Index> n0_override(const Json& solver) {
  if (solver.is_object() && solver.contains("n0") && !solver["n0"].is_null()) {
    try {
      return solver["n0"].get<Index>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("solver.n0: expected an integer");
    }
  }
  return std::nullopt;
}

SolverConfig parse_solver_section(const Json& j) {
  if (!j.contains("solver")) return SolverConfig{};
  Json solver = j["solver"];
  if (solver.is_object()) solver.erase("n0");
  return solver_config_from_json(solver, SolverConfig{}, "solver");
}

SolverConfig resolve_config(const SolverConfig& base, const std::optional<Index>& n0, Index n_total,
                            std::uint64_t seed) {
  SolverConfig cfg = base;
  cfg.n0 = n0.value_or(SolverConfig::defaults_for(n_total).n0);
  cfg.seed = seed;
  return cfg;
}

OracleSolution obtain_oracle(const OracleSettings& settings, const BuiltProblem& built) {
  if (settings.path) {
    const OracleSolution oracle = oracle_from_json(read_file(settings.path->string()));
    if (oracle.x_star.size() != built.problem->dim()) {
      throw std::runtime_error(fmt::format("oracle '{}' has dimension {}, problem has {}", settings.path->string(),
                                           oracle.x_star.size(), built.problem->dim()));
    }
    const auto kkt = verify_oracle(*built.problem, oracle);
    if (!(kkt.stationarity <= oracle.tol && kkt.feasibility <= oracle.tol)) {
      throw std::runtime_error(fmt::format("oracle '{}' fails its KKT check (stationarity {}, feasibility {})",
                                           settings.path->string(), kkt.stationarity, kkt.feasibility));
    }
    return oracle;
  }
  return load_or_compute_reference(*built.problem, built.identity, settings.tol, settings.cache_dir);
}

}  // namespace

const char* version_string() { return ASPEN_VERSION; }

void ExperimentSpec::validate() const {
  if (methods.empty()) throw ConfigError("experiment: at least one method is required");
  if (seeds.empty()) throw ConfigError("experiment: seeds must be nonempty");
  if (jobs < 1) throw ConfigError("experiment: jobs must be >= 1");
  if (oracle.enabled && !(oracle.tol > 0.0)) throw ConfigError("experiment: oracle.tol must be > 0");
}

void NoiseStudySpec::validate() const {
  if (sigmas.empty()) throw ConfigError("noise study: sigmas must be nonempty");
  if (seeds.empty()) throw ConfigError("noise study: seeds must be nonempty");
  for (double s : sigmas) {
    if (!(s >= 0.0)) throw ConfigError("noise study: every sigma must be >= 0");
  }
  if (n_components < 1) throw ConfigError("noise study: n must be >= 1");
  if (jobs < 1) throw ConfigError("noise study: jobs must be >= 1");
}

std::string trace_file_stem(Method method, std::uint64_t seed) {
  return fmt::format("{}_seed{}", to_string(method), seed);
}

std::string sidecar_json(const RunRequest& request, const std::string& problem_identity, const RunOutcome& outcome) {
  Json j;
  j["version"] = version_string();
  j["method"] = to_string(request.method);
  j["seed"] = request.seed;
  j["x0"] = {{"kind", "gaussian_normalized"}, {"seed", request.seed}};
  Json problem = to_json(request.problem);
  problem["identity"] = problem_identity;
  j["problem"] = problem;
  j["solver"] = to_json(request.config);
  j["cost_model"] = kCostModelDescription;
  Json monitor;
  monitor["full_gradient"] = request.monitor.full_gradient;
  if (request.monitor.x_star) {
    const auto& xs = *request.monitor.x_star;
    monitor["x_star"] = std::vector<double>(xs.data(), xs.data() + xs.size());
  } else {
    monitor["x_star"] = nullptr;
  }
  j["monitor"] = monitor;
  Json result;
  if (outcome.error) {
    result["error"] = *outcome.error;
  } else {
    result["termination"] = to_string(outcome.termination);
    result["iterations"] = outcome.trace.size();
    result["fev"] = outcome.fev;
    result["final_n_k"] = outcome.final_n_k;
    result["final_mu"] = outcome.final_mu;
  }
  j["result"] = result;
  return j.dump(2) + "\n";
}

RunOutcome execute_run(const RunRequest& request) {
  RunOutcome outcome;
  outcome.method = request.method;
  outcome.seed = request.seed;
  const std::string stem = trace_file_stem(request.method, request.seed);
  outcome.csv_path = request.out_dir / (stem + ".csv");
  outcome.sidecar_path = request.out_dir / (stem + ".json");
  std::string identity;
  try {
    const BuiltProblem built = make_problem(request.problem);
    identity = built.identity;
    const Vector<double> x0 = gaussian_normalized_init<double>(built.problem->dim(), request.seed);
    auto result = solve(request.method, *built.problem, request.config, x0, request.monitor);
    outcome.termination = result.termination;
    outcome.final_n_k = result.n_k;
    outcome.final_mu = result.mu;
    outcome.fev = result.fev;
    outcome.final_feas = constraint_violation(*built.problem, result.x);
    if (request.monitor.x_star) outcome.final_gap = (result.x - *request.monitor.x_star).norm();
    outcome.trace = std::move(result.trace);
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  try {
    std::filesystem::create_directories(request.out_dir);
    if (!outcome.error) write_text(outcome.csv_path, trace_to_csv(outcome.trace));
    write_text(outcome.sidecar_path, sidecar_json(request, identity, outcome));
  } catch (const std::exception& e) {
    if (!outcome.error) outcome.error = e.what();
  }
  return outcome;
}

RunRequest request_from_sidecar(const std::string& sidecar_text, const std::filesystem::path& out_dir) {
  const Json j = parse_json_document(sidecar_text, "sidecar");
  for (const char* key : {"method", "seed", "problem", "solver", "monitor"}) {
    if (!j.contains(key)) throw ConfigError(std::string("sidecar: missing '") + key + "'");
  }
  RunRequest request;
  request.method = parse_method(j["method"].get<std::string>());
  request.seed = j["seed"].get<std::uint64_t>();
  Json problem = j["problem"];
  const std::string identity = problem.value("identity", "");
  problem.erase("identity");
  request.problem = problem_spec_from_json(problem, "sidecar.problem");
  request.config = solver_config_from_json(j["solver"], SolverConfig{}, "sidecar.solver");
  const Json& monitor = j["monitor"];
  request.monitor.full_gradient = monitor.value("full_gradient", false);
  if (monitor.contains("x_star") && !monitor["x_star"].is_null()) {
    const auto xs = monitor["x_star"].get<std::vector<double>>();
    request.monitor.x_star = Eigen::Map<const Vector<double>>(xs.data(), static_cast<Index>(xs.size()));
  }
  request.out_dir = out_dir;
  if (!identity.empty()) {
    const BuiltProblem built = make_problem(request.problem);
    if (built.identity != identity) {
      throw ConfigError("sidecar: problem data changed since the run (recorded " + identity + ", now " +
                        built.identity + ")");
    }
  }
  return request;
}

std::vector<RunOutcome> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const BuiltProblem built = make_problem(spec.problem);
  const Index n_total = built.problem->num_components();
  TraceMonitor<double> monitor;
  monitor.full_gradient = spec.monitor_full_gradient;
  if (spec.oracle.enabled) monitor.x_star = obtain_oracle(spec.oracle, built).x_star;

  std::vector<RunRequest> requests;
  for (Method method : spec.methods) {
    for (std::uint64_t seed : spec.seeds) {
      RunRequest r;
      r.problem = spec.problem;
      r.method = method;
      r.seed = seed;
      r.config = resolve_config(spec.solver, spec.n0, n_total, seed);
      r.config.validate(n_total);
      r.monitor = monitor;
      r.out_dir = spec.out_dir;
      requests.push_back(std::move(r));
    }
  }
  std::vector<RunOutcome> outcomes(requests.size());
  parallel_for(requests.size(), spec.jobs, [&](std::size_t i) { outcomes[i] = execute_run(requests[i]); });
  return outcomes;
}

ExperimentSpec experiment_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("experiment: expected a JSON object");
  const std::set<std::string> allowed{"problem", "methods", "seeds", "solver", "oracle",
                                      "monitor_full_gradient", "out", "jobs"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("experiment: unknown key '" + key + "'");
  }
  if (!j.contains("problem")) throw ConfigError("experiment: missing 'problem'");
  ExperimentSpec spec;
  spec.problem = problem_spec_from_json(j["problem"]);
  for (const auto& name : read_list<std::string>(j, "methods", "experiment")) spec.methods.push_back(parse_method(name));
  if (!j.contains("methods")) spec.methods = {Method::Aspen, Method::Full, Method::Heur};
  spec.seeds = read_list<std::uint64_t>(j, "seeds", "experiment");
  if (!j.contains("seeds")) spec.seeds = {0};
  spec.solver = parse_solver_section(j);
  if (j.contains("solver")) spec.n0 = n0_override(j["solver"]);
  if (j.contains("oracle")) {
    const Json& o = j["oracle"];
    if (o.is_boolean()) {
      spec.oracle.enabled = o.get<bool>();
    } else {
      if (!o.is_object()) throw ConfigError("experiment.oracle: expected an object or a boolean");
      for (const auto& [key, value] : o.items()) {
        if (key != "enabled" && key != "tol" && key != "path" && key != "cache_dir") {
          throw ConfigError("experiment.oracle: unknown key '" + key + "'");
        }
      }
      spec.oracle.enabled = o.value("enabled", true);
      spec.oracle.tol = o.value("tol", spec.oracle.tol);
      if (o.contains("path") && !o["path"].is_null()) spec.oracle.path = o["path"].get<std::string>();
      if (o.contains("cache_dir")) spec.oracle.cache_dir = o["cache_dir"].get<std::string>();
    }
  }
  spec.monitor_full_gradient = j.value("monitor_full_gradient", false);
  if (j.contains("out")) spec.out_dir = j["out"].get<std::string>();
  spec.jobs = j.value("jobs", 1);
  return spec;
}

std::string noise_summary_csv(const std::vector<NoiseSummaryRow>& rows) {
  std::string out = "sigma,mean_final_n_k,mean_final_gap,runs,failures\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.sigma, r.mean_final_n_k, r.mean_final_gap, r.runs,
                       r.failures);
  }
  return out;
}

std::vector<NoiseSummaryRow> noise_study(const NoiseStudySpec& spec) {
  spec.validate();
  std::vector<RunRequest> requests;
  for (double sigma : spec.sigmas) {
    for (std::uint64_t seed : spec.seeds) {
      RunRequest r;
      r.problem = ProblemSpec::hs24(spec.n_components, sigma, seed);
      r.method = Method::Aspen;
      r.seed = seed;
      r.config = resolve_config(spec.solver, spec.n0, spec.n_components, seed);
      r.config.validate(spec.n_components);
      r.out_dir = spec.out_dir / fmt::format("sigma_{}", sigma);
      requests.push_back(std::move(r));
    }
  }
  std::vector<RunOutcome> outcomes(requests.size());
  parallel_for(requests.size(), spec.jobs, [&](std::size_t i) {
    RunRequest request = requests[i];
    try {
      const BuiltProblem built = make_problem(request.problem);
      request.monitor.x_star = compute_reference(*built.problem, spec.oracle_tol).x_star;
      outcomes[i] = execute_run(request);
    } catch (const std::exception& e) {
      outcomes[i].method = request.method;
      outcomes[i].seed = request.seed;
      outcomes[i].error = e.what();
    }
  });

  std::vector<NoiseSummaryRow> rows;
  std::size_t i = 0;
  for (double sigma : spec.sigmas) {
    NoiseSummaryRow row;
    row.sigma = sigma;
    for (std::size_t s = 0; s < spec.seeds.size(); ++s, ++i) {
      if (outcomes[i].error) {
        ++row.failures;
        continue;
      }
      ++row.runs;
      row.mean_final_n_k += static_cast<double>(outcomes[i].final_n_k);
      row.mean_final_gap += outcomes[i].final_gap;
    }
    if (row.runs > 0) {
      row.mean_final_n_k /= static_cast<double>(row.runs);
      row.mean_final_gap /= static_cast<double>(row.runs);
    } else {
      row.mean_final_n_k = row.mean_final_gap = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  std::filesystem::create_directories(spec.out_dir);
  write_text(spec.out_dir / "summary.csv", noise_summary_csv(rows));
  return rows;
}

NoiseStudySpec noise_study_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("noise study: expected a JSON object");
  const std::set<std::string> allowed{"sigmas", "n", "seeds", "solver", "oracle_tol", "out", "jobs"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("noise study: unknown key '" + key + "'");
  }
  NoiseStudySpec spec;
  spec.sigmas = read_list<double>(j, "sigmas", "noise_study");
  spec.seeds = read_list<std::uint64_t>(j, "seeds", "noise_study");
  spec.n_components = j.value("n", spec.n_components);
  spec.solver = parse_solver_section(j);
  if (j.contains("solver")) spec.n0 = n0_override(j["solver"]);
  spec.oracle_tol = j.value("oracle_tol", spec.oracle_tol);
  if (j.contains("out")) spec.out_dir = j["out"].get<std::string>();
  spec.jobs = j.value("jobs", 1);
  return spec;
}

}  // namespace aspen::harness
