#pragma once

#include "aspen/problem.hpp"

#include <cstdint>
#include <random>

namespace aspen {

/// x0 = z / ||z||, z ~ N(0, I_n). Deterministic for a fixed seed.
template <typename Scalar = double>
Vector<Scalar> gaussian_normalized_init(Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("init: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector<Scalar> z(n);
  for (;;) {
    for (Index i = 0; i < n; ++i) z(i) = Scalar(gauss(rng));
    const Scalar norm = z.norm();
    if (norm > Scalar(0)) return z / norm;
  }
}

}  // namespace aspen
