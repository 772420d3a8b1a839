#pragma once

#include "aspen/libsvm.hpp"
#include "aspen/problem.hpp"

#include <Eigen/SparseCore>

#include <cmath>
#include <vector>

namespace aspen {

/// log(1 + exp(t)) without overflow.
template <typename Scalar>
Scalar log1p_exp(Scalar t) {
  using std::abs, std::exp, std::log1p, std::max;
  return max(t, Scalar(0)) + log1p(exp(-abs(t)));
}

template <typename Scalar>
Scalar sigmoid(Scalar t) {
  using std::exp;
  if (t >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-t));
  const Scalar e = exp(t);
  return e / (Scalar(1) + e);
}

/// Sphere-constrained logistic regression,
///
///     f_i(x) = log(1 + exp(-b_i a_i^T x)),   ||x||^2 = 1.
template <typename Scalar>
class LogisticProblem final : public SphereConstrainedProblem<Scalar> {
 public:
  using typename FiniteSumProblem<Scalar>::VectorType;
  using typename FiniteSumProblem<Scalar>::ConstRef;
  using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

  explicit LogisticProblem(const SparseDataset& data) {
    if (data.n_rows() == 0) throw std::invalid_argument("logistic problem needs at least one row");
    std::vector<Eigen::Triplet<Scalar>> triplets;
    labels_.resize(static_cast<Index>(data.n_rows()));
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
      labels_(static_cast<Index>(r)) = Scalar(data.rows[r].label);
      for (const auto& e : data.rows[r].entries) {
        triplets.emplace_back(static_cast<Index>(r), e.index - 1, Scalar(e.value));
      }
    }
    features_.resize(static_cast<Index>(data.n_rows()), data.n_features);
    features_.setFromTriplets(triplets.begin(), triplets.end());
    features_.makeCompressed();
  }

  Index dim() const override { return features_.cols(); }
  Index num_components() const override { return features_.rows(); }

  const SparseMatrix& features() const { return features_; }
  const VectorType& labels() const { return labels_; }

  Scalar component_value(Index i, ConstRef x) const override {
    this->check_dim(x);
    return log1p_exp(margin(i, x));
  }

  VectorType component_gradient(Index i, ConstRef x) const override {
    this->check_dim(x);
    VectorType g = VectorType::Zero(dim());
    add_row(i, -labels_(i) * sigmoid(margin(i, x)), g);
    return g;
  }

  Scalar sample_value(std::span<const Index> sample, ConstRef x) const override {
    this->check_dim(x);
    Scalar sum(0);
    for (Index i : sample) sum += log1p_exp(margin(i, x));
    return sum / static_cast<Scalar>(sample.size());
  }

  // One forward product a_i^T x per component, reused by value and gradient.
  Scalar sample_value_gradient(std::span<const Index> sample, ConstRef x,
                               VectorType& grad) const override {
    this->check_dim(x);
    grad.setZero(dim());
    Scalar sum(0);
    for (Index i : sample) {
      const Scalar t = margin(i, x);
      sum += log1p_exp(t);
      add_row(i, -labels_(i) * sigmoid(t), grad);
    }
    const Scalar inv = Scalar(1) / static_cast<Scalar>(sample.size());
    grad *= inv;
    return sum * inv;
  }

 private:
  // t_i = -b_i a_i^T x
  Scalar margin(Index i, ConstRef x) const {
    Scalar dot(0);
    for (typename SparseMatrix::InnerIterator it(features_, i); it; ++it) dot += it.value() * x(it.index());
    return -labels_(i) * dot;
  }

  void add_row(Index i, Scalar coef, VectorType& out) const {
    for (typename SparseMatrix::InnerIterator it(features_, i); it; ++it) out(it.index()) += coef * it.value();
  }

  SparseMatrix features_;
  VectorType labels_;
};

}  // namespace aspen
