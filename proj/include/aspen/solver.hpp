#pragma once

#include "aspen/line_search.hpp"
#include "aspen/penalty.hpp"
#include "aspen/sampling.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace aspen {

enum class Method { Aspen, Full, Heur };
enum class Phase { MiniBatch, FullSample };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Aspen: return "aspen";
    case Method::Full: return "full";
    case Method::Heur: return "heur";
  }
  return "?";
}

inline const char* to_string(Phase p) { return p == Phase::FullSample ? "FS" : "MB"; }

struct SolverConfig {
  double mu0 = 1.0;
  Index n0 = 1;
  double c = 1e-4;       // additional-sampling decrease constant
  double C = 1.0;        // additional-sampling relaxation constant
  double gamma = 1.1;    // penalty growth factor
  Index d_size = 1;      // |D_k|
  GrowthRule growth = GrowthRule::increment();                // ASPEN, on a failed check
  GrowthRule heur_growth = GrowthRule::multiply_ceil(1.1);    // Heur, on the 1/mu test
  LineSearchParams line_search;
  EpsilonSchedule epsilon;
  std::uint64_t budget_fev = 100'000;
  std::uint64_t budget_iters = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t seed = 0;
  // Optional stop once the full-sample KKT residuals both drop below this.
  std::optional<double> kkt_tol;

  /// Experimental defaults: mu0 = 1, N0 = ceil(0.01 N), D = 1, c = 1e-4, C = 1,
  /// beta = 0.1, eta = 1e-4, gamma = 1.1, eps_k = (k+1)^-1.1.
  static SolverConfig defaults_for(Index n_total) {
    SolverConfig cfg;
    cfg.n0 = std::max<Index>(1, scaled_ceil(0.01, n_total));
    return cfg;
  }

  void validate(Index n_total) const {
    if (!(mu0 > 0.0)) throw std::invalid_argument("config: mu0 must be > 0");
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("config: c must lie in (0,1)");
    if (!(C > 0.0)) throw std::invalid_argument("config: C must be > 0");
    if (!(gamma > 1.0)) throw std::invalid_argument("config: gamma must be > 1");
    if (n0 < 1 || n0 > n_total) {
      throw std::invalid_argument("config: n0 = " + std::to_string(n0) + " outside [1, " +
                                  std::to_string(n_total) + "]");
    }
    if (d_size < 1 || d_size > n0) throw std::invalid_argument("config: d_size must lie in [1, n0]");
    if (kkt_tol && !(*kkt_tol > 0.0)) throw std::invalid_argument("config: kkt_tol must be > 0");
    growth.validate();
    heur_growth.validate();
    line_search.validate();
    epsilon.validate();
  }
};

template <typename Scalar>
struct SolverState {
  Vector<Scalar> x;
  std::uint64_t k = 0;
  Scalar mu;
  SampleState sample;
  CostMeter meter;

  SolverState(Vector<Scalar> x0, Scalar mu0, Index n0, std::uint64_t seed)
      : x(std::move(x0)), mu(mu0), sample(n0, seed) {}

  Phase phase(Index n_total) const {
    return sample.n_k == n_total ? Phase::FullSample : Phase::MiniBatch;
  }
};

/// One row per iteration, written after the update. Point quantities (feas,
/// full_grad_norm, gap) refer to x_{k+1}; n_k, mu_k, grad_norm and eps_k are
/// the values used during iteration k. NaN marks a quantity that was not
/// monitored.
struct TraceRecord {
  std::uint64_t k = 0;
  Phase phase = Phase::MiniBatch;
  Index n_k = 0;
  double mu_k = 0.0;
  double alpha_k = 0.0;
  bool accepted = false;
  std::uint64_t fev = 0;
  double feas = 0.0;
  double grad_norm = 0.0;
  double full_grad_norm = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double eps_k = 0.0;
};

/// Extra, uncharged observations attached to every trace row.
template <typename Scalar>
struct TraceMonitor {
  std::optional<Vector<Scalar>> x_star;
  bool full_gradient = false;
};

enum class Termination { FevBudget, IterationBudget, KktTolerance, LineSearchFailure };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::FevBudget: return "fev_budget";
    case Termination::IterationBudget: return "iteration_budget";
    case Termination::KktTolerance: return "kkt_tolerance";
    case Termination::LineSearchFailure: return "line_search_failure";
  }
  return "?";
}

template <typename Scalar>
struct RunResult {
  Vector<Scalar> x;
  Scalar mu;
  Index n_k;
  std::uint64_t fev;
  std::vector<TraceRecord> trace;
  Termination termination;
  std::string message;
};

/// Additional-sampling test on D:
///
///     F_D(x_trial, mu) <= F_D(x, mu) - c ||grad F_D(x, mu)||^2 + C eps_k.
template <typename Scalar>
bool acceptance_check(const PenaltyContext<Scalar>& ctx, std::span<const Index> d_sample,
                      ConstVectorRef<Scalar> x,
                      ConstVectorRef<Scalar> x_trial, Scalar eps_k, Scalar c,
                      Scalar C) {
  const auto at_x = penalty_value_gradient(ctx, d_sample, x);
  const Scalar at_trial = penalty_value(ctx, d_sample, x_trial);
  return at_trial <= at_x.value - c * at_x.gradient.squaredNorm() + C * eps_k;
}

namespace detail {

template <typename Scalar>
struct GradientStep {
  PenaltyEvaluation<Scalar> eval;
  LineSearchResult<Scalar> ls;
  double eps_k;
};

// Draws N_k (the full set once n_k = N), evaluates g_k and backtracks.
template <typename Scalar>
GradientStep<Scalar> gradient_step(SolverState<Scalar>& state, const FiniteSumProblem<Scalar>& problem,
                                   const SolverConfig& config) {
  const double eps_k = epsilon(config.epsilon, state.k);
  state.sample.redraw(problem.num_components());
  const PenaltyContext<Scalar> ctx(problem, state.mu, state.meter);
  auto eval = penalty_value_gradient(ctx, state.sample.indices, state.x);
  auto ls = backtrack(ctx, state.sample.indices, state.x, eval.gradient, eval.value, Scalar(eps_k),
                      config.line_search);
  return {std::move(eval), std::move(ls), eps_k};
}

template <typename Scalar>
TraceRecord begin_record(const SolverState<Scalar>& state, Index n_total, const GradientStep<Scalar>& step) {
  TraceRecord rec;
  rec.k = state.k;
  rec.phase = state.phase(n_total);
  rec.n_k = state.sample.n_k;
  rec.mu_k = static_cast<double>(state.mu);
  rec.alpha_k = static_cast<double>(step.ls.alpha);
  rec.grad_norm = static_cast<double>(step.eval.gradient.norm());
  rec.eps_k = step.eps_k;
  return rec;
}

template <typename Scalar>
void finish_record(TraceRecord& rec, const SolverState<Scalar>& state, const FiniteSumProblem<Scalar>& problem,
                   const TraceMonitor<Scalar>& monitor) {
  rec.fev = state.meter.count();
  rec.feas = static_cast<double>(constraint_violation(problem, state.x));
  if (monitor.full_gradient) {
    CostMeter scratch;
    const PenaltyContext<Scalar> ctx(problem, state.mu, scratch);
    rec.full_grad_norm = static_cast<double>(kkt_report(ctx, state.x).stationarity);
  }
  if (monitor.x_star) rec.gap = static_cast<double>((state.x - *monitor.x_star).norm());
}

// Full-sample iteration: unconditional acceptance, mu grows when ||g_k|| < 1/mu_k.
template <typename Scalar>
TraceRecord full_sample_step(SolverState<Scalar>& state, const FiniteSumProblem<Scalar>& problem,
                             const SolverConfig& config, const TraceMonitor<Scalar>& monitor) {
  const Index n_total = problem.num_components();
  auto step = gradient_step(state, problem, config);
  TraceRecord rec = begin_record(state, n_total, step);
  rec.accepted = true;
  state.x = std::move(step.ls.x_trial);
  if (step.eval.gradient.norm() < Scalar(1) / state.mu) state.mu *= Scalar(config.gamma);
  ++state.k;
  finish_record(rec, state, problem, monitor);
  return rec;
}

}  // namespace detail

/// One ASPEN iteration. Mutates `state` into the next iterate and returns
/// the row describing the transition. Throws LineSearchFailure.
template <typename Scalar>
TraceRecord aspen_step(SolverState<Scalar>& state, const FiniteSumProblem<Scalar>& problem,
                       const SolverConfig& config, const TraceMonitor<Scalar>& monitor = {}) {
  const Index n_total = problem.num_components();
  if (state.sample.n_k == n_total) return detail::full_sample_step(state, problem, config, monitor);

  auto step = detail::gradient_step(state, problem, config);
  TraceRecord rec = detail::begin_record(state, n_total, step);

  const PenaltyContext<Scalar> ctx(problem, state.mu, state.meter);
  const auto d_sample = draw_additional(state.sample.rng, n_total, config.d_size, state.sample.n_k);
  rec.accepted = acceptance_check(ctx, d_sample, state.x, step.ls.x_trial, Scalar(step.eps_k),
                                  Scalar(config.c), Scalar(config.C));
  if (rec.accepted) {
    state.x = std::move(step.ls.x_trial);
  } else {
    state.sample.n_k = grow(config.growth, state.sample.n_k, n_total);
  }
  // Feasibility test at the pre-step iterate x_k.
  if (step.eval.feasibility > Scalar(step.eps_k)) state.mu *= Scalar(config.gamma);
  ++state.k;
  detail::finish_record(rec, state, problem, monitor);
  return rec;
}

/// Full-sample penalty method: gradient steps on F(., mu_k) with the same
/// nonmonotone line search; mu_{k+1} = gamma mu_k once ||grad F|| < 1/mu_k.
template <typename Scalar>
TraceRecord full_step(SolverState<Scalar>& state, const FiniteSumProblem<Scalar>& problem,
                      const SolverConfig& config, const TraceMonitor<Scalar>& monitor = {}) {
  state.sample.n_k = problem.num_components();
  return detail::full_sample_step(state, problem, config, monitor);
}

/// Heuristic: every candidate is accepted; when ||g_k|| < 1/mu_k both the
/// penalty (times gamma) and the sample size (heur_growth) increase.
template <typename Scalar>
TraceRecord heur_step(SolverState<Scalar>& state, const FiniteSumProblem<Scalar>& problem,
                      const SolverConfig& config, const TraceMonitor<Scalar>& monitor = {}) {
  const Index n_total = problem.num_components();
  if (state.sample.n_k == n_total) return detail::full_sample_step(state, problem, config, monitor);

  auto step = detail::gradient_step(state, problem, config);
  TraceRecord rec = detail::begin_record(state, n_total, step);
  rec.accepted = true;
  state.x = std::move(step.ls.x_trial);
  if (step.eval.gradient.norm() < Scalar(1) / state.mu) {
    state.mu *= Scalar(config.gamma);
    state.sample.n_k = grow(config.heur_growth, state.sample.n_k, n_total);
  }
  ++state.k;
  detail::finish_record(rec, state, problem, monitor);
  return rec;
}

/// Iterates `method` from x0 until the FEV or iteration budget is spent, the
/// optional KKT tolerance is met, or the line search fails. A line-search
/// failure ends the run and is reported in `termination`, not thrown.
template <typename Scalar>
RunResult<Scalar> solve(Method method, const FiniteSumProblem<Scalar>& problem, const SolverConfig& config,
                        const Vector<Scalar>& x0, const TraceMonitor<Scalar>& monitor = {}) {
  const Index n_total = problem.num_components();
  config.validate(n_total);
  problem.check_dim(x0);
  const Index n0 = method == Method::Full ? n_total : config.n0;
  SolverState<Scalar> state(x0, Scalar(config.mu0), n0, config.seed);

  RunResult<Scalar> result{};
  result.termination = Termination::IterationBudget;
  while (true) {
    if (state.k >= config.budget_iters) {
      result.termination = Termination::IterationBudget;
      break;
    }
    if (state.meter.count() >= config.budget_fev) {
      result.termination = Termination::FevBudget;
      break;
    }
    try {
      switch (method) {
        case Method::Aspen: result.trace.push_back(aspen_step(state, problem, config, monitor)); break;
        case Method::Full: result.trace.push_back(full_step(state, problem, config, monitor)); break;
        case Method::Heur: result.trace.push_back(heur_step(state, problem, config, monitor)); break;
      }
    } catch (const LineSearchFailure& e) {
      result.termination = Termination::LineSearchFailure;
      result.message = e.what();
      break;
    }
    if (config.kkt_tol) {
      CostMeter scratch;
      const PenaltyContext<Scalar> ctx(problem, state.mu, scratch);
      const auto kkt = kkt_report(ctx, state.x);
      if (kkt.stationarity <= Scalar(*config.kkt_tol) && kkt.feasibility <= Scalar(*config.kkt_tol)) {
        result.termination = Termination::KktTolerance;
        break;
      }
    }
  }
  result.x = state.x;
  result.mu = state.mu;
  result.n_k = state.sample.n_k;
  result.fev = state.meter.count();
  return result;
}

template <typename Scalar>
RunResult<Scalar> aspen_run(const FiniteSumProblem<Scalar>& problem, const SolverConfig& config,
                            const Vector<Scalar>& x0, const TraceMonitor<Scalar>& monitor = {}) {
  return solve(Method::Aspen, problem, config, x0, monitor);
}

template <typename Scalar>
RunResult<Scalar> full_run(const FiniteSumProblem<Scalar>& problem, const SolverConfig& config,
                           const Vector<Scalar>& x0, const TraceMonitor<Scalar>& monitor = {}) {
  return solve(Method::Full, problem, config, x0, monitor);
}

template <typename Scalar>
RunResult<Scalar> heur_run(const FiniteSumProblem<Scalar>& problem, const SolverConfig& config,
                           const Vector<Scalar>& x0, const TraceMonitor<Scalar>& monitor = {}) {
  return solve(Method::Heur, problem, config, x0, monitor);
}

}  // namespace aspen
