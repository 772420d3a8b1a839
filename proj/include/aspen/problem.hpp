#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace aspen {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Read-only view accepting any dense vector expression. Scalar is not
/// deduced from it, so free functions take Scalar from their other arguments.
template <typename Scalar>
using ConstVectorRef = Eigen::Ref<const Vector<std::type_identity_t<Scalar>>>;

/// Equality-constrained finite-sum problem
///
///     min (1/N) sum_i f_i(x)   s.t.  h(x) = 0,   h : R^n -> R^m.
///
/// Component indices are 0-based. Implementations must be immutable after
/// construction; every method is const and safe to call concurrently.
template <typename Scalar>
class FiniteSumProblem {
 public:
  using VectorType = Vector<Scalar>;
  using ConstRef = Eigen::Ref<const VectorType>;

  virtual ~FiniteSumProblem() = default;

  virtual Index dim() const = 0;
  virtual Index num_components() const = 0;
  virtual Index num_constraints() const = 0;

  virtual Scalar component_value(Index i, ConstRef x) const = 0;
  virtual VectorType component_gradient(Index i, ConstRef x) const = 0;

  /// h(x), an m-vector.
  virtual VectorType constraint_value(ConstRef x) const = 0;
  /// Jacobian-transpose action: returns J_h(x)^T v.
  virtual VectorType constraint_jtv(ConstRef x, ConstRef v) const = 0;

  virtual std::optional<VectorType> known_solution() const { return std::nullopt; }

  /// Mean of f_i over `sample`.
  virtual Scalar sample_value(std::span<const Index> sample, ConstRef x) const {
    Scalar sum(0);
    for (Index i : sample) sum += component_value(i, x);
    return sum / static_cast<Scalar>(sample.size());
  }

  /// Mean of f_i over `sample`, with the mean gradient written to `grad`.
  /// Overrides should share work between value and gradient.
  virtual Scalar sample_value_gradient(std::span<const Index> sample, ConstRef x,
                                       VectorType& grad) const {
    Scalar sum(0);
    grad.setZero(dim());
    for (Index i : sample) {
      sum += component_value(i, x);
      grad += component_gradient(i, x);
    }
    const Scalar inv = Scalar(1) / static_cast<Scalar>(sample.size());
    grad *= inv;
    return sum * inv;
  }

  void check_dim(ConstRef x) const {
    if (x.size() != dim()) {
      throw std::invalid_argument("dimension mismatch: expected " + std::to_string(dim()) +
                                  ", got " + std::to_string(x.size()));
    }
  }
};

/// Base for problems constrained to the unit sphere, h(x) = ||x||^2 - 1.
template <typename Scalar>
class SphereConstrainedProblem : public FiniteSumProblem<Scalar> {
 public:
  using typename FiniteSumProblem<Scalar>::VectorType;
  using typename FiniteSumProblem<Scalar>::ConstRef;

  Index num_constraints() const override { return 1; }

  VectorType constraint_value(ConstRef x) const override {
    this->check_dim(x);
    VectorType h(1);
    h(0) = x.squaredNorm() - Scalar(1);
    return h;
  }

  VectorType constraint_jtv(ConstRef x, ConstRef v) const override {
    this->check_dim(x);
    if (v.size() != 1) throw std::invalid_argument("sphere constraint expects a 1-vector multiplier");
    return (Scalar(2) * v(0)) * x;
  }
};

}  // namespace aspen
