#pragma once

#include "aspen/problem.hpp"
#include "aspen/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace aspen::harness {

/// Reference solution x* with the penalty parameter at which its KKT
/// residuals were certified.
struct OracleSolution {
  Vector<double> x_star;
  double mu = 1.0;
  double tol = 1e-6;
  double kkt_stationarity = 0.0;
  double kkt_feasibility = 0.0;
  std::string provenance;  // content hash of problem identity + oracle settings
};

struct OracleOptions {
  std::uint64_t full_budget_fev = 2'000'000;  // warm start by the Full method
  std::uint64_t seed = 0;
  int max_newton_iters = 200;
  int max_continuations = 40;
};

class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(const std::string& what, OracleSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const OracleSolution& best() const { return best_; }

 private:
  OracleSolution best_;
};

/// Runs the Full method from a Gaussian-normalised start, then polishes with
/// Newton steps on the full penalty function (finite-difference Hessian of
/// the exact gradient), raising mu until stationarity and feasibility are
/// both <= tol. Throws OracleFailure with the best point on failure.
OracleSolution compute_reference(const FiniteSumProblem<double>& problem, double tol,
                                 const OracleOptions& options = {});

/// Re-evaluates the stored KKT residuals at the stored penalty parameter.
KktReport<double> verify_oracle(const FiniteSumProblem<double>& problem, const OracleSolution& oracle);

std::string oracle_to_json(const OracleSolution& oracle);
OracleSolution oracle_from_json(const std::string& text);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string content_hash(std::string_view text);

/// Cache file for a given provenance hash inside `cache_dir`.
std::filesystem::path oracle_cache_path(const std::filesystem::path& cache_dir, const std::string& provenance);

/// Loads `<cache_dir>/oracle_<hash>.json` when present (and re-verifies it),
/// otherwise computes and stores it. `identity` must describe the problem
/// completely (data content hash, noise seed, ...).
OracleSolution load_or_compute_reference(const FiniteSumProblem<double>& problem, const std::string& identity,
                                         double tol, const std::filesystem::path& cache_dir,
                                         const OracleOptions& options = {});

}  // namespace aspen::harness
