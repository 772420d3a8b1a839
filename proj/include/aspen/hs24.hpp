#pragma once

#include "aspen/problem.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace aspen {

/// Frozen noise realisation for the perturbed HS24 problem.
struct NoisyHs24Spec {
  Index n_components = 1;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> noise;  // eps_i ~ N(0, sigma^2), one per component

  static NoisyHs24Spec draw(Index n_components, double sigma, std::uint64_t seed) {
    if (n_components < 1) throw std::invalid_argument("hs24: need at least one component");
    if (!(sigma >= 0.0)) throw std::invalid_argument("hs24: sigma must be >= 0");
    NoisyHs24Spec spec{n_components, sigma, seed, {}};
    spec.noise.resize(static_cast<std::size_t>(n_components), 0.0);
    if (sigma > 0.0) {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> gauss(0.0, sigma);
      for (auto& e : spec.noise) e = gauss(rng);
    }
    return spec;
  }
};

/// HS24 objective with per-component noise, on the unit circle:
///
///     f_i(x) = (x1 - 2)^4 + (x1 - 2 x2)^2 + eps_i^2 ||x||^2.
template <typename Scalar>
class NoisyHs24Problem final : public SphereConstrainedProblem<Scalar> {
 public:
  using typename FiniteSumProblem<Scalar>::VectorType;
  using typename FiniteSumProblem<Scalar>::ConstRef;

  explicit NoisyHs24Problem(NoisyHs24Spec spec) : spec_(std::move(spec)) {
    if (static_cast<Index>(spec_.noise.size()) != spec_.n_components || spec_.n_components < 1) {
      throw std::invalid_argument("hs24: noise vector must have exactly N entries");
    }
    noise_sq_.resize(spec_.n_components);
    for (Index i = 0; i < spec_.n_components; ++i) {
      const Scalar e(spec_.noise[static_cast<std::size_t>(i)]);
      noise_sq_(i) = e * e;
    }
  }

  Index dim() const override { return 2; }
  Index num_components() const override { return spec_.n_components; }
  const NoisyHs24Spec& spec() const { return spec_; }

  Scalar component_value(Index i, ConstRef x) const override {
    this->check_dim(x);
    return base_value(x) + noise_sq_(i) * x.squaredNorm();
  }

  VectorType component_gradient(Index i, ConstRef x) const override {
    this->check_dim(x);
    return base_gradient(x) + (Scalar(2) * noise_sq_(i)) * x;
  }

  Scalar sample_value(std::span<const Index> sample, ConstRef x) const override {
    this->check_dim(x);
    return base_value(x) + mean_noise_sq(sample) * x.squaredNorm();
  }

  Scalar sample_value_gradient(std::span<const Index> sample, ConstRef x,
                               VectorType& grad) const override {
    this->check_dim(x);
    const Scalar noise = mean_noise_sq(sample);
    grad = base_gradient(x) + (Scalar(2) * noise) * x;
    return base_value(x) + noise * x.squaredNorm();
  }

 private:
  static Scalar base_value(ConstRef x) {
    const Scalar a = x(0) - Scalar(2);
    const Scalar b = x(0) - Scalar(2) * x(1);
    return a * a * a * a + b * b;
  }

  static VectorType base_gradient(ConstRef x) {
    const Scalar a = x(0) - Scalar(2);
    const Scalar b = x(0) - Scalar(2) * x(1);
    VectorType g(2);
    g(0) = Scalar(4) * a * a * a + Scalar(2) * b;
    g(1) = Scalar(-4) * b;
    return g;
  }

  Scalar mean_noise_sq(std::span<const Index> sample) const {
    Scalar s(0);
    for (Index i : sample) s += noise_sq_(i);
    return s / static_cast<Scalar>(sample.size());
  }

  NoisyHs24Spec spec_;
  VectorType noise_sq_;
};

}  // namespace aspen
