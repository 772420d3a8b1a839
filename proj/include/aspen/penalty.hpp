#pragma once

#include "aspen/problem.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace aspen {

/// Cumulative count of n-dimensional inner products charged to one run (FEV).
///
/// Cost model: one unit per component value (a_i^T x), one more when the
/// gradient of that component is formed at the same point; one unit for the
/// constraint value and one more for J_h^T h. Value on a sample S costs
/// |S| + 1, value and gradient together cost 2|S| + 2.
class CostMeter {
 public:
  void charge(std::uint64_t units) { count_ += units; }
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t count_ = 0;
};

inline constexpr const char* kCostModelDescription =
    "1 FEV per n-dimensional inner product: component value = 1, component value+gradient = 2, "
    "constraint value = 1, constraint value+J^T h = 2; value on sample S = |S|+1, "
    "value+gradient on S = 2|S|+2; rejected line-search trials are charged (|S|+1 each)";

inline std::uint64_t value_cost(std::size_t sample_size) { return sample_size + 1; }
inline std::uint64_t value_gradient_cost(std::size_t sample_size) { return 2 * sample_size + 2; }

/// A problem, a penalty parameter and the meter that evaluations are charged to.
template <typename Scalar>
class PenaltyContext {
 public:
  PenaltyContext(const FiniteSumProblem<Scalar>& problem, Scalar mu, CostMeter& meter)
      : problem_(&problem), mu_(mu), meter_(&meter) {
    if (!(mu >= Scalar(0)) || !std::isfinite(static_cast<double>(mu))) {
      throw std::invalid_argument("penalty parameter must be finite and nonnegative");
    }
  }

  const FiniteSumProblem<Scalar>& problem() const { return *problem_; }
  Scalar mu() const { return mu_; }
  CostMeter& meter() const { return *meter_; }

 private:
  const FiniteSumProblem<Scalar>* problem_;
  Scalar mu_;
  CostMeter* meter_;
};

template <typename Scalar>
struct PenaltyEvaluation {
  Scalar value;
  Vector<Scalar> gradient;
  Scalar feasibility;  // ||h(x)||
};

template <typename Scalar>
struct KktReport {
  Vector<Scalar> lambda;
  Scalar stationarity;
  Scalar feasibility;
};

inline void validate_sample(std::span<const Index> sample, Index n_components) {
  if (sample.empty()) throw std::invalid_argument("sample must be nonempty");
  for (Index i : sample) {
    if (i < 0 || i >= n_components) {
      throw std::out_of_range("sample index " + std::to_string(i) + " outside [0, " +
                              std::to_string(n_components) + ")");
    }
  }
}

inline std::vector<Index> full_sample(Index n_components) {
  std::vector<Index> all(static_cast<std::size_t>(n_components));
  std::iota(all.begin(), all.end(), Index(0));
  return all;
}

/// F_S(x, mu) = (1/|S|) sum_{i in S} f_i(x) + (mu/2) ||h(x)||^2.
template <typename Scalar>
Scalar penalty_value(const PenaltyContext<Scalar>& ctx, std::span<const Index> sample,
                     ConstVectorRef<Scalar> x) {
  const auto& problem = ctx.problem();
  validate_sample(sample, problem.num_components());
  const Scalar f = problem.sample_value(sample, x);
  const Scalar hsq = problem.constraint_value(x).squaredNorm();
  ctx.meter().charge(value_cost(sample.size()));
  return f + Scalar(0.5) * ctx.mu() * hsq;
}

/// Value and gradient at a shared point,
/// grad F_S(x, mu) = grad f_S(x) + mu J_h(x)^T h(x).
template <typename Scalar>
PenaltyEvaluation<Scalar> penalty_value_gradient(const PenaltyContext<Scalar>& ctx,
                                                 std::span<const Index> sample,
                                                 ConstVectorRef<Scalar> x) {
  const auto& problem = ctx.problem();
  validate_sample(sample, problem.num_components());
  PenaltyEvaluation<Scalar> out;
  const Scalar f = problem.sample_value_gradient(sample, x, out.gradient);
  const Vector<Scalar> h = problem.constraint_value(x);
  out.gradient += ctx.mu() * problem.constraint_jtv(x, h);
  out.feasibility = h.norm();
  out.value = f + Scalar(0.5) * ctx.mu() * h.squaredNorm();
  ctx.meter().charge(value_gradient_cost(sample.size()));
  return out;
}

template <typename Scalar>
Vector<Scalar> penalty_gradient(const PenaltyContext<Scalar>& ctx, std::span<const Index> sample,
                                ConstVectorRef<Scalar> x) {
  return penalty_value_gradient(ctx, sample, x).gradient;
}

/// ||h(x)||. The violation function q(x) is half its square.
template <typename Scalar>
Scalar constraint_violation(const FiniteSumProblem<Scalar>& problem,
                            ConstVectorRef<Scalar> x) {
  return problem.constraint_value(x).norm();
}

/// KKT residuals on the full sample with the multiplier estimate lambda = mu h(x).
/// Since grad F(x, mu) = grad f(x) + J_h^T (mu h), stationarity equals the
/// full penalty-gradient norm.
template <typename Scalar>
KktReport<Scalar> kkt_report(const PenaltyContext<Scalar>& ctx,
                             ConstVectorRef<Scalar> x) {
  const auto& problem = ctx.problem();
  const auto all = full_sample(problem.num_components());
  Vector<Scalar> grad_f;
  problem.sample_value_gradient(all, x, grad_f);
  const Vector<Scalar> h = problem.constraint_value(x);
  KktReport<Scalar> report;
  report.lambda = ctx.mu() * h;
  report.stationarity = (grad_f + problem.constraint_jtv(x, report.lambda)).norm();
  report.feasibility = h.norm();
  ctx.meter().charge(value_gradient_cost(all.size()));
  return report;
}

}  // namespace aspen
