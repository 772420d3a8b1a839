#pragma once

#include "aspen/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace aspen {

struct LineSearchParams {
  double beta = 0.1;  // backtracking factor
  double eta = 1e-4;  // Armijo constant
  int j_max = 50;     // largest backtracking exponent tried

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("line search: beta must lie in (0,1)");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("line search: eta must lie in (0,1)");
    if (j_max < 1) throw std::invalid_argument("line search: j_max must be >= 1");
  }
};

/// Summable relaxation eps_k = (k + 1)^(-exponent), exponent > 1.
struct EpsilonSchedule {
  double exponent = 1.1;

  void validate() const {
    if (!(exponent > 1.0)) throw std::invalid_argument("epsilon schedule: exponent must be > 1");
  }
};

inline double epsilon(const EpsilonSchedule& schedule, std::uint64_t k) {
  return std::pow(static_cast<double>(k) + 1.0, -schedule.exponent);
}

class LineSearchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct LineSearchResult {
  Scalar alpha;
  Vector<Scalar> x_trial;
  Scalar f_trial;
  int backtracks;  // rejected trials before acceptance
};

/// Nonmonotone backtracking along -g: the largest alpha = beta^j, j = 0..j_max, with
///
///     F_S(x - alpha g, mu) <= F_S(x, mu) - eta alpha ||g||^2 + eps_k.
///
/// `f_x` is F_S(x, mu), already available from the gradient evaluation. Each
/// trial is charged to the context's meter; non-finite trial values count
/// as rejections.
template <typename Scalar>
LineSearchResult<Scalar> backtrack(const PenaltyContext<Scalar>& ctx, std::span<const Index> sample,
                                   ConstVectorRef<Scalar> x,
                                   ConstVectorRef<Scalar> g, Scalar f_x, Scalar eps_k,
                                   const LineSearchParams& params) {
  params.validate();
  const Scalar g_sq = g.squaredNorm();
  const Scalar beta(params.beta);
  const Scalar eta(params.eta);
  for (int j = 0; j <= params.j_max; ++j) {
    using std::pow;
    const Scalar alpha = pow(beta, Scalar(j));
    Vector<Scalar> x_trial = x - alpha * g;
    const Scalar f_trial = penalty_value(ctx, sample, x_trial);
    if (std::isfinite(static_cast<double>(f_trial)) && f_trial <= f_x - eta * alpha * g_sq + eps_k) {
      return {alpha, std::move(x_trial), f_trial, j};
    }
  }
  throw LineSearchFailure("line search failed: no step beta^j with j <= " + std::to_string(params.j_max) +
                          " satisfied the sufficient-decrease condition");
}

}  // namespace aspen
