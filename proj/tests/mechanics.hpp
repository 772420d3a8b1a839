#pragma once

#include "aspen/solver.hpp"

#include <fmt/format.h>

#include <string>
#include <vector>

namespace aspen::testing {

struct MechanicsReport {
  std::size_t rows = 0;
  std::size_t mb_rows = 0;
  std::size_t fs_rows = 0;
  std::size_t rejected = 0;
  std::vector<std::string> violations;
};

// F_S by the generic component loop, bypassing any sample overrides.
inline double reference_penalty(const FiniteSumProblem<double>& p, std::span<const Index> s,
                                const Vector<double>& x, double mu) {
  double f = 0.0;
  for (Index i : s) f += p.component_value(i, x);
  f /= static_cast<double>(s.size());
  return f + 0.5 * mu * p.constraint_value(x).squaredNorm();
}

inline Vector<double> reference_gradient(const FiniteSumProblem<double>& p, std::span<const Index> s,
                                         const Vector<double>& x, double mu) {
  Vector<double> g = Vector<double>::Zero(p.dim());
  for (Index i : s) g += p.component_gradient(i, x);
  g /= static_cast<double>(s.size());
  return g + mu * p.constraint_jtv(x, p.constraint_value(x));
}

/// Steps ASPEN `iterations` times and checks every transition against the
/// per-row invariants of the method.
inline MechanicsReport check_aspen_mechanics(const FiniteSumProblem<double>& problem, const SolverConfig& config,
                                             const Vector<double>& x0, std::size_t iterations) {
  const Index N = problem.num_components();
  config.validate(N);
  SolverState<double> state(x0, config.mu0, config.n0, config.seed);
  MechanicsReport report;
  auto fail = [&](std::uint64_t k, const std::string& what) {
    report.violations.push_back(fmt::format("k={}: {}", k, what));
  };
  bool reached_fs = false;
  for (std::size_t it = 0; it < iterations; ++it) {
    const Vector<double> x_before = state.x;
    const double mu_before = state.mu;
    const Index n_before = state.sample.n_k;
    const TraceRecord r = aspen_step(state, problem, config);
    ++report.rows;

    const bool x_moved = state.x != x_before;
    const bool n_same = state.sample.n_k == n_before;
    if (!(state.mu == mu_before || state.mu == mu_before * config.gamma)) {
      fail(r.k, fmt::format("mu ratio {} not in {{1, gamma}}", state.mu / mu_before));
    }
    if (state.sample.n_k < n_before) fail(r.k, "sample size decreased");
    if (state.sample.n_k > N) fail(r.k, "sample size exceeds N");
    if (r.n_k != n_before || r.mu_k != mu_before) fail(r.k, "row does not record the iteration's n_k / mu_k");
    if (r.phase == Phase::FullSample) {
      ++report.fs_rows;
      reached_fs = true;
      if (!r.accepted) fail(r.k, "full-sample row rejected");
      if (!n_same) fail(r.k, "full-sample row changed N");
    } else {
      ++report.mb_rows;
      if (reached_fs) fail(r.k, "returned to mini-batch phase after full sample");
      if (!r.accepted) ++report.rejected;
      // accepted <=> x moved <=> N unchanged. A zero step (g = 0) cannot move x,
      // so the middle link is only asserted when the step is nonzero.
      const bool zero_step = state.x == x_before && r.accepted && r.grad_norm == 0.0;
      if (r.accepted != n_same) fail(r.k, "acceptance and unchanged N disagree");
      if (!zero_step && r.accepted != x_moved) fail(r.k, "acceptance and movement of x disagree");
      if (!r.accepted && state.sample.n_k < n_before + 1) fail(r.k, "rejection without growth");
    }
    if ((r.phase == Phase::FullSample) != (n_before == N)) fail(r.k, "phase does not match n_k == N");

    // Independent re-evaluation of the sufficient-decrease inequality.
    const auto& s = state.sample.indices;
    const double f_x = reference_penalty(problem, s, x_before, mu_before);
    const Vector<double> g = reference_gradient(problem, s, x_before, mu_before);
    const Vector<double> trial = x_before - r.alpha_k * g;
    const double f_trial = reference_penalty(problem, s, trial, mu_before);
    const double rhs = f_x - config.line_search.eta * r.alpha_k * g.squaredNorm() + r.eps_k;
    if (!(f_trial <= rhs + 1e-12 * (1.0 + std::abs(f_x)))) {
      fail(r.k, fmt::format("alpha {} violates the line-search inequality ({} > {})", r.alpha_k, f_trial, rhs));
    }
    if (r.accepted && (state.x - trial).norm() > 1e-12 * (1.0 + trial.norm())) {
      fail(r.k, "accepted iterate differs from x - alpha g");
    }
  }
  return report;
}

}  // namespace aspen::testing
