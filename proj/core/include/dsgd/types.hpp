// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Validated value types shared by every dsgd module.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsgd {

using Count = std::int64_t;

/// Thrown when two vectors that must share a dimension do not.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(const std::string& where, std::size_t expected, std::size_t got);
};

/// Thrown when a value violates a type invariant at construction.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void check_same_dim(const char* where, std::size_t expected, std::size_t got);

/// Real-valued gradient (or minibatch estimate). Non-empty, every entry finite.
class GradientVector {
 public:
  explicit GradientVector(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double l1_norm() const;
  double sq_norm() const;

 private:
  std::vector<double> values_;
};

/// ZIM hyperparameters. `r` doubles as the fixed learning rate.
class ZimConfig {
 public:
  ZimConfig(Count n, double r, double c, double delta = 1.0);

  Count n() const { return n_; }
  double r() const { return r_; }
  double c() const { return c_; }
  double delta() const { return delta_; }

  ZimConfig with_r(double r) const { return {n_, r, c_, delta_}; }

 private:
  Count n_;
  double r_;
  double c_;
  double delta_;
};

/// Discrete distribution: entries in [0,1], compensated sum within 1e-12 of 1.
class ProbabilityVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit ProbabilityVector(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

  double sum_of_squares() const;

 private:
  std::vector<double> probs_;
};

/// Integer update in lattice units; ||steps||_1 <= bound.
class UpdateVector {
 public:
  UpdateVector(std::vector<Count> steps, Count bound);

  std::size_t dim() const { return steps_.size(); }
  std::span<const Count> steps() const { return steps_; }
  Count operator[](std::size_t i) const { return steps_[i]; }
  Count bound() const { return bound_; }

  Count l1_norm() const;
  double sq_norm() const;
  UpdateVector negated() const;

  friend bool operator==(const UpdateVector&, const UpdateVector&) = default;

 private:
  std::vector<Count> steps_;
  Count bound_;
};

/// Weights w = anchor - delta * coords. Coordinates are exact integers.
class LatticeWeights {
 public:
  LatticeWeights(std::vector<double> anchor, double delta);
  LatticeWeights(std::vector<double> anchor, std::vector<Count> coords, double delta);

  std::size_t dim() const { return anchor_.size(); }
  double delta() const { return delta_; }
  std::span<const double> anchor() const { return anchor_; }
  std::span<const Count> coords() const { return coords_; }

  /// coords += update, i.e. w <- w - delta * update.
  void apply(const UpdateVector& update);

  double weight(std::size_t i) const;
  std::vector<double> weights() const;
  void weights_into(std::span<double> out) const;

 private:
  std::vector<double> anchor_;
  std::vector<Count> coords_;
  double delta_;
};

/// Scalars governing the update-bound assumptions and the convergence bound.
struct TheoryConstants {
  double L = 0.0;
  double F_inf = 0.0;
  double mu = 0.0;
  double M = 0.0;
  double M_G = 0.0;
};

struct StepRecord {
  Count k = 0;
  double objective = 0.0;
  double grad_sq_norm = 0.0;
  double running_mean_grad_sq = 0.0;
  double update_l1 = 0.0;  // ZIM: lattice units; SGD: weight units
  std::optional<double> accuracy;
};

struct ConfigVerdict {
  bool valid = true;
  std::string violation;

  explicit operator bool() const { return valid; }
};

/// Accepts iff 0 < r <= mu / (L * M_G). M_G == 0 accepts any r in (0, 1].
ConfigVerdict validate_config(const ZimConfig& cfg, const TheoryConstants& consts);

}  // namespace dsgd
