#pragma once

#include "aspen/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace aspen {

using Rng = std::mt19937_64;

enum class GrowthKind { IncrementByOne, MultiplyCeil, JumpToFull };

struct GrowthRule {
  GrowthKind kind = GrowthKind::IncrementByOne;
  double factor = 1.1;  // used by MultiplyCeil only

  static GrowthRule increment() { return {GrowthKind::IncrementByOne, 1.1}; }
  static GrowthRule multiply_ceil(double factor) { return {GrowthKind::MultiplyCeil, factor}; }
  static GrowthRule jump_to_full() { return {GrowthKind::JumpToFull, 1.1}; }

  void validate() const {
    if (kind == GrowthKind::MultiplyCeil && !(factor > 1.0)) {
      throw std::invalid_argument("growth rule: factor must be > 1");
    }
  }
};

/// ceil(factor * n), ignoring the representation error of factor
/// (1.1 * 10 evaluates to 11.000000000000002 in binary64).
inline Index scaled_ceil(double factor, Index n) {
  const double product = factor * static_cast<double>(n);
  return static_cast<Index>(std::ceil(product * (1.0 - 8.0 * std::numeric_limits<double>::epsilon())));
}

/// Next sample size after a growth trigger; always in {n_k + 1, ..., N}.
inline Index grow(const GrowthRule& rule, Index n_k, Index n_total) {
  rule.validate();
  if (n_k < 1 || n_k >= n_total) {
    throw std::invalid_argument("grow: sample size " + std::to_string(n_k) + " cannot grow within N = " +
                                std::to_string(n_total));
  }
  switch (rule.kind) {
    case GrowthKind::IncrementByOne:
      return n_k + 1;
    case GrowthKind::MultiplyCeil:
      return std::clamp(scaled_ceil(rule.factor, n_k), n_k + 1, n_total);
    case GrowthKind::JumpToFull:
      return n_total;
  }
  return n_total;
}

namespace detail {

// Partial Fisher-Yates: `count` distinct indices uniform over [0, n_total), sorted.
inline std::vector<Index> sample_without_replacement(Rng& rng, Index n_total, Index count) {
  std::vector<Index> pool = full_sample(n_total);
  for (Index j = 0; j < count; ++j) {
    std::uniform_int_distribution<Index> pick(j, n_total - 1);
    std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace detail

/// Uniform mini-batch without replacement. The full sample is returned
/// without touching the generator.
inline std::vector<Index> draw_minibatch(Rng& rng, Index n_total, Index n_k) {
  if (n_k < 1 || n_k > n_total) {
    throw std::invalid_argument("draw_minibatch: size " + std::to_string(n_k) + " outside [1, " +
                                std::to_string(n_total) + "]");
  }
  if (n_k == n_total) return full_sample(n_total);
  return detail::sample_without_replacement(rng, n_total, n_k);
}

/// Additional sample D_k, drawn from the full index set independently of the
/// mini-batch. Requires 1 <= d_k <= n_k.
inline std::vector<Index> draw_additional(Rng& rng, Index n_total, Index d_k, Index n_k) {
  if (d_k < 1) throw std::invalid_argument("draw_additional: size must be >= 1");
  if (d_k > n_k) {
    throw std::invalid_argument("draw_additional: size " + std::to_string(d_k) +
                                " exceeds current sample size " + std::to_string(n_k));
  }
  if (n_k > n_total) throw std::invalid_argument("draw_additional: current sample size exceeds N");
  if (d_k == n_total) return full_sample(n_total);
  return detail::sample_without_replacement(rng, n_total, d_k);
}

/// Realised mini-batch plus the generator that produces it.
struct SampleState {
  Index n_k = 1;
  std::vector<Index> indices;
  Rng rng;

  SampleState(Index n0, std::uint64_t seed) : n_k(n0), rng(seed) {}

  void redraw(Index n_total) { indices = draw_minibatch(rng, n_total, n_k); }
};

}  // namespace aspen
