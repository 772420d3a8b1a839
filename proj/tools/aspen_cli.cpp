#include "aspen/harness/config_io.hpp"
#include "aspen/harness/experiment.hpp"
#include "aspen/harness/oracle.hpp"
#include "aspen/harness/problem_spec.hpp"
#include "aspen/harness/trace_io.hpp"
#include "aspen/libsvm.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

using namespace aspen;
using namespace aspen::harness;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget_fev;
  std::string out;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Run a single seed (replaces the configured list)");
  cmd->add_option("--budget-fev", o.budget_fev, "FEV budget per run");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--jobs", o.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  return parse_json_document(read_file(path), path);
}

void apply_common(ExperimentSpec& spec, const CommonOptions& o) {
  if (o.seed) spec.seeds = {*o.seed};
  if (o.budget_fev) spec.solver.budget_fev = *o.budget_fev;
  if (!o.out.empty()) spec.out_dir = o.out;
  if (o.jobs) spec.jobs = *o.jobs;
}

int report(const std::vector<RunOutcome>& outcomes) {
  int failures = 0;
  for (const auto& r : outcomes) {
    if (r.error) {
      ++failures;
      fmt::print(stderr, "{} seed {}: FAILED: {}\n", to_string(r.method), r.seed, *r.error);
      continue;
    }
    fmt::print("{:<6} seed {:<4} iters {:<7} fev {:<9} n_k {:<6} mu {:<11.4g} feas {:<10.3e} gap {:<10.3e} {}  -> {}\n",
               to_string(r.method), r.seed, r.trace.size(), r.fev, r.final_n_k, r.final_mu, r.final_feas,
               r.final_gap, to_string(r.termination), r.csv_path.string());
  }
  return failures == 0 ? 0 : 1;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> methods;
  for (const auto& n : names) methods.push_back(parse_method(n));
  return methods;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additional-sampling penalty method: experiments and tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  CommonOptions run_opts;
  std::string run_method = "aspen";
  std::string from_sidecar;
  auto* run = app.add_subcommand("run", "Run one method from an experiment config or a sidecar");
  add_common(run, run_opts);
  run->add_option("--method", run_method, "aspen, full or heur");
  run->add_option("--from-sidecar", from_sidecar, "Re-execute the run described by a sidecar")
      ->check(CLI::ExistingFile);

  CommonOptions bench_opts;
  std::vector<std::string> bench_methods;
  std::vector<std::uint64_t> bench_seeds;
  std::string bench_data;
  bool bench_unit_norm = false;
  bool bench_no_oracle = false;
  auto* bench = app.add_subcommand("bench", "Compare methods on one problem with shared starting points");
  add_common(bench, bench_opts);
  bench->add_option("--methods", bench_methods, "Comma-separated methods")->delimiter(',');
  bench->add_option("--seeds", bench_seeds, "Comma-separated seeds")->delimiter(',');
  bench->add_option("--data", bench_data, "LIBSVM file (logistic problem)")->check(CLI::ExistingFile);
  bench->add_flag("--unit-norm", bench_unit_norm, "Rescale data rows to unit norm");
  bench->add_flag("--no-oracle", bench_no_oracle, "Skip x* and the gap column");

  std::string oracle_problem;
  std::string oracle_data;
  double oracle_sigma = 0.0;
  Index oracle_n = 100;
  std::uint64_t oracle_noise_seed = 0;
  double oracle_tol = 1e-6;
  std::string oracle_out = "oracle_cache";
  bool oracle_unit_norm = false;
  auto* oracle = app.add_subcommand("oracle", "Compute (or load) and cache the reference solution");
  oracle->add_option("--problem", oracle_problem, "logistic or hs24")->required();
  oracle->add_option("--data", oracle_data, "LIBSVM file for logistic")->check(CLI::ExistingFile);
  oracle->add_flag("--unit-norm", oracle_unit_norm, "Rescale data rows to unit norm");
  oracle->add_option("--sigma", oracle_sigma, "HS24 noise level")->check(CLI::NonNegativeNumber);
  oracle->add_option("--n", oracle_n, "HS24 number of components")->check(CLI::PositiveNumber);
  oracle->add_option("--noise-seed", oracle_noise_seed, "HS24 noise realisation");
  oracle->add_option("--tol", oracle_tol, "KKT tolerance")->check(CLI::PositiveNumber);
  oracle->add_option("--out", oracle_out, "Cache directory");

  CommonOptions noise_opts;
  std::vector<double> noise_sigmas;
  std::optional<Index> noise_n;
  std::vector<std::uint64_t> noise_seeds;
  auto* noise = app.add_subcommand("noise-study", "ASPEN on noisy HS24 across noise levels");
  add_common(noise, noise_opts);
  noise->add_option("--sigmas", noise_sigmas, "Comma-separated noise levels")->delimiter(',');
  noise->add_option("--n", noise_n, "Number of components");
  noise->add_option("--seeds", noise_seeds, "Comma-separated seeds")->delimiter(',');

  std::vector<std::string> validate_files;
  auto* validate = app.add_subcommand("validate-data", "Parse LIBSVM files and report their shape");
  validate->add_option("files", validate_files, "LIBSVM files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (!from_sidecar.empty()) {
        const auto sidecar_dir = std::filesystem::path(from_sidecar).parent_path();
        RunRequest request =
            request_from_sidecar(read_file(from_sidecar), run_opts.out.empty() ? sidecar_dir : std::filesystem::path(run_opts.out));
        if (run_opts.seed || run_opts.budget_fev) {
          throw ConfigError("--seed and --budget-fev cannot be combined with --from-sidecar");
        }
        return report({execute_run(request)});
      }
      if (run_opts.config.empty()) throw ConfigError("run: --config or --from-sidecar is required");
      ExperimentSpec spec = experiment_from_json(load_config(run_opts.config));
      spec.methods = {parse_method(run_method)};
      apply_common(spec, run_opts);
      return report(run_experiment(spec));
    }
    if (*bench) {
      Json cfg = load_config(bench_opts.config);
      if (!bench_data.empty()) cfg["problem"] = to_json(ProblemSpec::logistic(bench_data, bench_unit_norm));
      if (!cfg.contains("problem")) throw ConfigError("bench: --data or a config with 'problem' is required");
      ExperimentSpec spec = experiment_from_json(cfg);
      if (!bench_methods.empty()) spec.methods = parse_methods(bench_methods);
      if (!bench_seeds.empty()) spec.seeds = bench_seeds;
      if (bench_no_oracle) spec.oracle.enabled = false;
      apply_common(spec, bench_opts);
      return report(run_experiment(spec));
    }
    if (*oracle) {
      ProblemSpec spec;
      if (oracle_problem == "logistic") {
        if (oracle_data.empty()) throw ConfigError("oracle: --data is required for logistic problems");
        spec = ProblemSpec::logistic(oracle_data, oracle_unit_norm);
      } else if (oracle_problem == "hs24") {
        spec = ProblemSpec::hs24(oracle_n, oracle_sigma, oracle_noise_seed);
      } else {
        throw ConfigError("oracle: --problem must be logistic or hs24, got '" + oracle_problem + "'");
      }
      const BuiltProblem built = make_problem(spec);
      const OracleSolution sol = load_or_compute_reference(*built.problem, built.identity, oracle_tol, oracle_out);
      fmt::print("oracle {} stationarity {:.3e} feasibility {:.3e} mu {:.4g}\n",
                 oracle_cache_path(oracle_out, sol.provenance).string(), sol.kkt_stationarity,
                 sol.kkt_feasibility, sol.mu);
      return 0;
    }
    if (*noise) {
      NoiseStudySpec spec = noise_study_from_json(load_config(noise_opts.config));
      if (!noise_sigmas.empty()) spec.sigmas = noise_sigmas;
      if (noise_n) spec.n_components = *noise_n;
      if (!noise_seeds.empty()) spec.seeds = noise_seeds;
      if (noise_opts.seed) spec.seeds = {*noise_opts.seed};
      if (noise_opts.budget_fev) spec.solver.budget_fev = *noise_opts.budget_fev;
      if (!noise_opts.out.empty()) spec.out_dir = noise_opts.out;
      if (noise_opts.jobs) spec.jobs = *noise_opts.jobs;
      const auto rows = noise_study(spec);
      std::cout << noise_summary_csv(rows);
      for (const auto& r : rows) {
        if (r.failures > 0) return 1;
      }
      return 0;
    }
    if (*validate) {
      int status = 0;
      for (const auto& file : validate_files) {
        try {
          const SparseDataset data = load_libsvm(file);
          std::size_t positives = 0;
          for (const auto& row : data.rows) positives += row.label > 0 ? 1 : 0;
          fmt::print("{}: ok, {} rows, {} features, {} positive\n", file, data.n_rows(), data.n_features, positives);
        } catch (const std::exception& e) {
          fmt::print(stderr, "error: {}\n", e.what());
          status = 1;
        }
      }
      return status;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
