#pragma once

#include "aspen/harness/config_io.hpp"
#include "aspen/harness/oracle.hpp"
#include "aspen/harness/problem_spec.hpp"
#include "aspen/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aspen::harness {

/// Build version recorded in every sidecar.
const char* version_string();

struct OracleSettings {
  bool enabled = true;
  double tol = 1e-6;
  std::optional<std::filesystem::path> path;  // explicit oracle file; otherwise the cache is used
  std::filesystem::path cache_dir = "oracle_cache";
};

struct ExperimentSpec {
  ProblemSpec problem;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds;
  SolverConfig solver;
  std::optional<Index> n0;  // unset: ceil(0.01 N)
  OracleSettings oracle;
  bool monitor_full_gradient = false;
  std::filesystem::path out_dir = "runs";
  int jobs = 1;

  void validate() const;
};

/// One fully resolved (problem, method, seed) run.
struct RunRequest {
  ProblemSpec problem;
  Method method = Method::Aspen;
  std::uint64_t seed = 0;
  SolverConfig config;  // n0 and seed already resolved
  TraceMonitor<double> monitor;
  std::filesystem::path out_dir;
};

struct RunOutcome {
  Method method = Method::Aspen;
  std::uint64_t seed = 0;
  std::filesystem::path csv_path;
  std::filesystem::path sidecar_path;
  std::optional<std::string> error;  // set when the run itself failed
  Termination termination = Termination::FevBudget;
  Index final_n_k = 0;
  double final_mu = 0.0;
  double final_gap = std::numeric_limits<double>::quiet_NaN();
  double final_feas = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t fev = 0;
  std::vector<TraceRecord> trace;
};

std::string trace_file_stem(Method method, std::uint64_t seed);

/// Runs from x0 = gaussian_normalized_init(n, seed) and writes
/// `<stem>.csv` plus the `<stem>.json` sidecar into request.out_dir.
/// Solver and I/O errors are returned in the outcome, never thrown.
RunOutcome execute_run(const RunRequest& request);

/// Sidecar text for a finished run. Contains every input needed to rerun it.
std::string sidecar_json(const RunRequest& request, const std::string& problem_identity, const RunOutcome& outcome);

/// Rebuilds the request stored in a sidecar; the problem data must still
/// hash to the recorded identity.
RunRequest request_from_sidecar(const std::string& sidecar_text, const std::filesystem::path& out_dir);

/// All (method, seed) runs of `spec`, in method-major order. Setup errors
/// (problem, oracle, validation) throw; per-run failures are reported in
/// the outcomes.
std::vector<RunOutcome> run_experiment(const ExperimentSpec& spec);

/// Parses an experiment document. `solver` keys override the experimental defaults.
ExperimentSpec experiment_from_json(const Json& j);

struct NoiseStudySpec {
  std::vector<double> sigmas;
  Index n_components = 1000;
  std::vector<std::uint64_t> seeds;
  SolverConfig solver;
  std::optional<Index> n0;
  double oracle_tol = 1e-6;
  std::filesystem::path out_dir = "noise_study";
  int jobs = 1;

  void validate() const;
};

struct NoiseSummaryRow {
  double sigma = 0.0;
  double mean_final_n_k = 0.0;
  double mean_final_gap = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
};

/// ASPEN on HS24 for every (sigma, seed); seed s also fixes the noise
/// realisation. Traces go to `<out>/sigma_<sigma>/`, the per-sigma means to
/// `<out>/summary.csv`.
std::vector<NoiseSummaryRow> noise_study(const NoiseStudySpec& spec);
NoiseStudySpec noise_study_from_json(const Json& j);
std::string noise_summary_csv(const std::vector<NoiseSummaryRow>& rows);

}  // namespace aspen::harness
