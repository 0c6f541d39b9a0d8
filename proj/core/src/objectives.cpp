// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "dsgd/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dsgd/analysis.hpp"
#include "dsgd/rng.hpp"

namespace dsgd {
namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> w) {
  return {w.data(), static_cast<Eigen::Index>(w.size())};
}

Eigen::Map<Eigen::VectorXd> as_vector(std::span<double> w) {
  return {w.data(), static_cast<Eigen::Index>(w.size())};
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::vector<double> Objective::gradient(std::span<const double> w) const {
  std::vector<double> g(dim());
  value_and_gradient(w, g);
  return g;
}

double Objective::batch_value_and_gradient(std::span<const double> w,
                                           std::span<const std::size_t> /*batch*/,
                                           std::span<double> grad) const {
  return value_and_gradient(w, grad);
}

// --- quadratic -------------------------------------------------------------

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd A, Eigen::VectorXd b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() == 0 || A_.rows() != A_.cols()) {
    throw std::invalid_argument("QuadraticObjective: A must be square and non-empty");
  }
  check_same_dim("QuadraticObjective", static_cast<std::size_t>(A_.rows()),
                 static_cast<std::size_t>(b_.size()));
  const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("QuadraticObjective: A is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A_);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff();
  const double tol = 1e-10 * std::max(1.0, std::abs(lmax));
  if (lambda.minCoeff() < -tol) {
    throw std::invalid_argument("QuadraticObjective: A is not positive semidefinite");
  }
  L_ = std::max(lmax, 0.0);

  // Bounded below iff b has no component in the null space of A.
  const Eigen::VectorXd coeff = eig.eigenvectors().transpose() * b_;
  double f_inf = 0.0;
  bool bounded = true;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > tol) {
      f_inf -= 0.5 * coeff(i) * coeff(i) / lambda(i);
    } else if (std::abs(coeff(i)) > 1e-12 * std::max(1.0, b_.norm())) {
      bounded = false;
    }
  }
  if (bounded) f_inf_ = f_inf;
}

QuadraticObjective QuadraticObjective::isotropic(std::size_t d, double scale) {
  const auto n = static_cast<Eigen::Index>(d);
  return {scale * Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)};
}

double QuadraticObjective::value(std::span<const double> w) const {
  check_same_dim("QuadraticObjective::value", dim(), w.size());
  const auto x = as_vector(w);
  return 0.5 * x.dot(A_ * x) - b_.dot(x);
}

double QuadraticObjective::value_and_gradient(std::span<const double> w,
                                              std::span<double> grad) const {
  check_same_dim("QuadraticObjective::value_and_gradient", dim(), w.size());
  check_same_dim("QuadraticObjective::value_and_gradient", dim(), grad.size());
  const auto x = as_vector(w);
  const Eigen::VectorXd ax = A_ * x;
  as_vector(grad) = ax - b_;
  return 0.5 * x.dot(ax) - b_.dot(x);
}

LinearMap QuadraticObjective::hessian_map() const {
  return {dim(), [this](std::span<const double> in, std::span<double> out) {
            as_vector(out) = A_ * as_vector(in);
          }};
}

// --- logistic regression ---------------------------------------------------

LogisticObjective::LogisticObjective(std::shared_ptr<const Dataset> data, double l2)
    : data_(std::move(data)), l2_(l2) {
  if (!data_ || data_->size() == 0) throw std::invalid_argument("LogisticObjective: empty data");
  if (data_->num_classes() > 2) {
    throw std::invalid_argument("LogisticObjective: labels must be in {0, 1}");
  }
  if (l2_ < 0.0) throw std::invalid_argument("LogisticObjective: l2 must be >= 0");
  L_ = estimate_lipschitz(gram_map()) / 4.0 + l2_;
}

LinearMap LogisticObjective::gram_map() const {
  return {dim(), [this](std::span<const double> in, std::span<double> out) {
            const auto& x = data_->features();
            const Eigen::VectorXd xv = x * as_vector(in);
            as_vector(out) = x.transpose() * xv / static_cast<double>(data_->size());
          }};
}

double LogisticObjective::evaluate(std::span<const double> w, std::span<const std::size_t> batch,
                                   std::span<double> grad) const {
  check_same_dim("LogisticObjective", dim(), w.size());
  const auto wv = as_vector(w);
  const auto& x = data_->features();
  const auto labels = data_->labels();
  const bool full = batch.empty();
  const std::size_t m = full ? data_->size() : batch.size();

  Eigen::VectorXd g = Eigen::VectorXd::Zero(wv.size());
  double loss = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = full ? k : batch[k];
    const auto row = x.row(static_cast<Eigen::Index>(i));
    const double z = row.dot(wv);
    const double y = labels[i];
    loss += softplus(z) - y * z;
    if (!grad.empty()) g += (sigmoid(z) - y) * row.transpose();
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  if (!grad.empty()) {
    check_same_dim("LogisticObjective gradient", dim(), grad.size());
    as_vector(grad) = g * inv_m + l2_ * wv;
  }
  return loss * inv_m + 0.5 * l2_ * wv.squaredNorm();
}

double LogisticObjective::value(std::span<const double> w) const { return evaluate(w, {}, {}); }

double LogisticObjective::value_and_gradient(std::span<const double> w,
                                             std::span<double> grad) const {
  return evaluate(w, {}, grad);
}

double LogisticObjective::batch_value_and_gradient(std::span<const double> w,
                                                   std::span<const std::size_t> batch,
                                                   std::span<double> grad) const {
  if (batch.empty()) throw std::invalid_argument("LogisticObjective: empty batch");
  return evaluate(w, batch, grad);
}

double LogisticObjective::accuracy(std::span<const double> w, const Dataset& data) const {
  check_same_dim("LogisticObjective::accuracy", dim(), data.num_features());
  const Eigen::VectorXd z = data.features() * as_vector(w);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int predicted = z(static_cast<Eigen::Index>(i)) >= 0.0 ? 1 : 0;
    correct += predicted == data.labels()[i];
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

// --- Rosenbrock ------------------------------------------------------------

RosenbrockObjective::RosenbrockObjective(std::size_t d) : d_(d) {
  if (d_ < 2) throw std::invalid_argument("RosenbrockObjective: d must be >= 2");
  std::vector<double> vertex(d_);
  auto spectral_norm = [&]() {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian(vertex), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  };
  if (d_ <= 12) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d_); ++mask) {
      for (std::size_t i = 0; i < d_; ++i) {
        vertex[i] = (mask >> i) & 1U ? kDomainHalfWidth : -kDomainHalfWidth;
      }
      L_ = std::max(L_, spectral_norm());
    }
  } else {
    Rng rng(0x5eed);
    for (int s = 0; s < 4096; ++s) {
      for (auto& v : vertex) v = rng.next() >> 63 ? kDomainHalfWidth : -kDomainHalfWidth;
      L_ = std::max(L_, spectral_norm());
    }
  }
}

double RosenbrockObjective::value(std::span<const double> w) const {
  check_same_dim("RosenbrockObjective::value", d_, w.size());
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < d_; ++i) {
    const double a = w[i + 1] - w[i] * w[i];
    const double b = 1.0 - w[i];
    f += 100.0 * a * a + b * b;
  }
  return f;
}

double RosenbrockObjective::value_and_gradient(std::span<const double> w,
                                               std::span<double> grad) const {
  check_same_dim("RosenbrockObjective::value_and_gradient", d_, w.size());
  check_same_dim("RosenbrockObjective::value_and_gradient", d_, grad.size());
  std::fill(grad.begin(), grad.end(), 0.0);
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < d_; ++i) {
    const double a = w[i + 1] - w[i] * w[i];
    const double b = 1.0 - w[i];
    f += 100.0 * a * a + b * b;
    grad[i] += -400.0 * w[i] * a - 2.0 * b;
    grad[i + 1] += 200.0 * a;
  }
  return f;
}

Eigen::MatrixXd RosenbrockObjective::hessian(std::span<const double> w) const {
  check_same_dim("RosenbrockObjective::hessian", d_, w.size());
  const auto n = static_cast<Eigen::Index>(d_);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    h(i, i) += 1200.0 * w[ui] * w[ui] - 400.0 * w[ui + 1] + 2.0;
    h(i + 1, i + 1) += 200.0;
    h(i, i + 1) = -400.0 * w[ui];
    h(i + 1, i) = h(i, i + 1);
  }
  return h;
}

}  // namespace dsgd
