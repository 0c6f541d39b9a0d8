// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dsgd/dataset.hpp"
#include "dsgd/types.hpp"

namespace dsgd {

/// y = H x for a symmetric operator of dimension `dim`.
struct LinearMap {
  std::size_t dim = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
};

/// Differentiable objective F : R^d -> R.
///
/// Implementations are immutable after construction and safe for concurrent
/// evaluation. Data-driven objectives also expose per-batch evaluation; the
/// loss is a mean over examples, so the full gradient is the example-weighted
/// mean of batch gradients.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;

  virtual double value(std::span<const double> w) const = 0;
  /// Writes the gradient into `grad` and returns F(w).
  virtual double value_and_gradient(std::span<const double> w, std::span<double> grad) const = 0;

  std::vector<double> gradient(std::span<const double> w) const;

  /// Gradient Lipschitz constant, where known.
  virtual std::optional<double> lipschitz() const { return std::nullopt; }
  /// Lower bound F_inf, where known.
  virtual std::optional<double> lower_bound() const { return std::nullopt; }
  /// Half-width of the box [-h, h]^d on which lipschitz() holds; nullopt means everywhere.
  virtual std::optional<double> lipschitz_domain() const { return std::nullopt; }

  /// Number of examples for minibatch evaluation; 0 for deterministic objectives.
  virtual std::size_t num_examples() const { return 0; }
  virtual double batch_value_and_gradient(std::span<const double> w,
                                          std::span<const std::size_t> batch,
                                          std::span<double> grad) const;
};

/// F(w) = 1/2 w^T A w - b^T w with A symmetric positive semidefinite.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Eigen::MatrixXd A, Eigen::VectorXd b);
  static QuadraticObjective isotropic(std::size_t d, double scale = 1.0);

  std::string name() const override { return "quadratic"; }
  std::size_t dim() const override { return static_cast<std::size_t>(b_.size()); }
  double value(std::span<const double> w) const override;
  double value_and_gradient(std::span<const double> w, std::span<double> grad) const override;
  std::optional<double> lipschitz() const override { return L_; }
  std::optional<double> lower_bound() const override { return f_inf_; }

  const Eigen::MatrixXd& hessian() const { return A_; }
  LinearMap hessian_map() const;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double L_ = 0.0;
  std::optional<double> f_inf_;
};

/// Mean logistic loss on labels in {0, 1} plus (l2 / 2) ||w||^2. No intercept;
/// append a constant feature for one.
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(std::shared_ptr<const Dataset> data, double l2);

  std::string name() const override { return "logistic"; }
  std::size_t dim() const override { return data_->num_features(); }
  double value(std::span<const double> w) const override;
  double value_and_gradient(std::span<const double> w, std::span<double> grad) const override;
  /// lambda_max(X^T X) / (4 m) + l2, by power iteration.
  std::optional<double> lipschitz() const override { return L_; }
  std::optional<double> lower_bound() const override { return 0.0; }
  std::size_t num_examples() const override { return data_->size(); }
  double batch_value_and_gradient(std::span<const double> w, std::span<const std::size_t> batch,
                                  std::span<double> grad) const override;

  double accuracy(std::span<const double> w, const Dataset& data) const;
  /// X^T X / m.
  LinearMap gram_map() const;

 private:
  double evaluate(std::span<const double> w, std::span<const std::size_t> batch,
                  std::span<double> grad) const;

  std::shared_ptr<const Dataset> data_;
  double l2_;
  double L_ = 0.0;
};

/// sum_i 100 (w_{i+1} - w_i^2)^2 + (1 - w_i)^2, d >= 2.
///
/// Nonconvex with no global gradient Lipschitz constant. lipschitz() reports
/// the largest Hessian spectral norm over the vertices of [-2, 2]^d (all of
/// them for d <= 12, 4096 seeded samples otherwise); lambda_max of the Hessian
/// is convex in w, so its box maximum sits on a vertex.
class RosenbrockObjective final : public Objective {
 public:
  static constexpr double kDomainHalfWidth = 2.0;

  explicit RosenbrockObjective(std::size_t d);

  std::string name() const override { return "rosenbrock"; }
  std::size_t dim() const override { return d_; }
  double value(std::span<const double> w) const override;
  double value_and_gradient(std::span<const double> w, std::span<double> grad) const override;
  std::optional<double> lipschitz() const override { return L_; }
  std::optional<double> lower_bound() const override { return 0.0; }
  std::optional<double> lipschitz_domain() const override { return kDomainHalfWidth; }

  Eigen::MatrixXd hessian(std::span<const double> w) const;

 private:
  std::size_t d_;
  double L_ = 0.0;
};

enum class Activation { kRelu, kTanh };

struct MlpSpec {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., classes
  Activation activation = Activation::kRelu;
  bool bias = false;

  std::size_t num_parameters() const;
};

/// Fully connected classifier with softmax cross-entropy (mean over examples).
///
/// Parameters are one flat vector: for each layer its weight matrix
/// (out x in, row-major), followed by its bias when enabled.
class MlpObjective final : public Objective {
 public:
  MlpObjective(MlpSpec spec, std::shared_ptr<const Dataset> data);

  std::string name() const override { return "mlp"; }
  std::size_t dim() const override { return dim_; }
  double value(std::span<const double> w) const override;
  double value_and_gradient(std::span<const double> w, std::span<double> grad) const override;
  std::optional<double> lower_bound() const override { return 0.0; }
  std::size_t num_examples() const override { return data_->size(); }
  double batch_value_and_gradient(std::span<const double> w, std::span<const std::size_t> batch,
                                  std::span<double> grad) const override;

  const MlpSpec& spec() const { return spec_; }

  /// Mean cross-entropy and accuracy of `w` on any dataset with matching shape.
  double loss(std::span<const double> w, const Dataset& data) const;
  double accuracy(std::span<const double> w, const Dataset& data) const;

  /// Glorot-uniform weights, zero biases. With delta > 0, every entry is
  /// rounded to the nearest multiple of delta.
  std::vector<double> initial_weights(std::uint64_t seed, double delta = 0.0) const;

 private:
  double evaluate(std::span<const double> w, const RowMatrix& x, std::span<const int> labels,
                  std::span<double> grad, std::size_t* correct) const;
  double evaluate_rows(std::span<const double> w, const Dataset& data,
                       std::span<const std::size_t> rows, std::span<double> grad,
                       std::size_t* correct) const;

  MlpSpec spec_;
  std::shared_ptr<const Dataset> data_;
  std::size_t dim_;
};

}  // namespace dsgd
