// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "dsgd/types.hpp"

#include <cmath>
#include <sstream>

namespace dsgd {
namespace {

// Neumaier summation; q built by division keeps each entry within half an ulp,
// so a compensated sum stays far inside the 1e-12 tolerance even for d ~ 1e5.
double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

std::string describe_dims(const std::string& where, std::size_t expected, std::size_t got) {
  std::ostringstream os;
  os << where << ": dimension mismatch (expected " << expected << ", got " << got << ")";
  return os.str();
}

}  // namespace

DimensionError::DimensionError(const std::string& where, std::size_t expected, std::size_t got)
    : std::invalid_argument(describe_dims(where, expected, got)) {}

void check_same_dim(const char* where, std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionError(where, expected, got);
}

GradientVector::GradientVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvariantError("GradientVector: dimension must be >= 1");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvariantError("GradientVector: non-finite entry at index " + std::to_string(i));
    }
  }
}

double GradientVector::l1_norm() const {
  double s = 0.0;
  for (double v : values_) s += std::abs(v);
  return s;
}

double GradientVector::sq_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

ZimConfig::ZimConfig(Count n, double r, double c, double delta)
    : n_(n), r_(r), c_(c), delta_(delta) {
  if (n_ < 1) throw InvariantError("ZimConfig: n must be >= 1");
  if (!(r_ >= 0.0 && r_ <= 1.0)) throw InvariantError("ZimConfig: r must lie in [0, 1]");
  if (!(c_ > 0.0) || !std::isfinite(c_)) throw InvariantError("ZimConfig: c must be > 0");
  if (!(delta_ > 0.0) || !std::isfinite(delta_)) {
    throw InvariantError("ZimConfig: delta must be > 0");
  }
}

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvariantError("ProbabilityVector: empty");
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvariantError("ProbabilityVector: entry " + std::to_string(i) +
                           " outside [0, 1]");
    }
  }
  const double total = compensated_sum(probs_);
  if (std::abs(total - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "ProbabilityVector: entries sum to " << total;
    throw InvariantError(os.str());
  }
}

double ProbabilityVector::sum_of_squares() const {
  double s = 0.0;
  for (double p : probs_) s += p * p;
  return s;
}

UpdateVector::UpdateVector(std::vector<Count> steps, Count bound)
    : steps_(std::move(steps)), bound_(bound) {
  if (steps_.empty()) throw InvariantError("UpdateVector: dimension must be >= 1");
  if (bound_ < 0) throw InvariantError("UpdateVector: negative bound");
  Count l1 = 0;
  for (Count s : steps_) {
    if (s < -bound_ || s > bound_) throw InvariantError("UpdateVector: entry exceeds bound");
    l1 += s < 0 ? -s : s;
    if (l1 > bound_) throw InvariantError("UpdateVector: l1 norm exceeds bound");
  }
}

Count UpdateVector::l1_norm() const {
  Count l1 = 0;
  for (Count s : steps_) l1 += s < 0 ? -s : s;
  return l1;
}

double UpdateVector::sq_norm() const {
  double s = 0.0;
  for (Count v : steps_) s += static_cast<double>(v) * static_cast<double>(v);
  return s;
}

UpdateVector UpdateVector::negated() const {
  std::vector<Count> neg(steps_.size());
  for (std::size_t i = 0; i < steps_.size(); ++i) neg[i] = -steps_[i];
  return {std::move(neg), bound_};
}

LatticeWeights::LatticeWeights(std::vector<double> anchor, double delta)
    : LatticeWeights(std::move(anchor), {}, delta) {}

LatticeWeights::LatticeWeights(std::vector<double> anchor, std::vector<Count> coords, double delta)
    : anchor_(std::move(anchor)), coords_(std::move(coords)), delta_(delta) {
  if (anchor_.empty()) throw InvariantError("LatticeWeights: dimension must be >= 1");
  if (coords_.empty()) coords_.assign(anchor_.size(), 0);
  check_same_dim("LatticeWeights", anchor_.size(), coords_.size());
  if (!(delta_ > 0.0) || !std::isfinite(delta_)) {
    throw InvariantError("LatticeWeights: delta must be > 0");
  }
}

void LatticeWeights::apply(const UpdateVector& update) {
  check_same_dim("LatticeWeights::apply", coords_.size(), update.dim());
  const auto steps = update.steps();
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += steps[i];
}

double LatticeWeights::weight(std::size_t i) const {
  return anchor_[i] - delta_ * static_cast<double>(coords_[i]);
}

std::vector<double> LatticeWeights::weights() const {
  std::vector<double> w(anchor_.size());
  weights_into(w);
  return w;
}

void LatticeWeights::weights_into(std::span<double> out) const {
  check_same_dim("LatticeWeights::weights_into", anchor_.size(), out.size());
  for (std::size_t i = 0; i < anchor_.size(); ++i) out[i] = weight(i);
}

ConfigVerdict validate_config(const ZimConfig& cfg, const TheoryConstants& consts) {
  const double r = cfg.r();
  if (!(r > 0.0)) return {false, "learning rate r must satisfy 0 < r"};
  if (consts.M_G == 0.0) return {};
  const double limit = consts.mu / (consts.L * consts.M_G);
  if (r <= limit) return {};
  std::ostringstream os;
  os.precision(17);
  os << "r <= mu / (L * M_G) violated: " << r << " > " << consts.mu << " / (" << consts.L
     << " * " << consts.M_G << ") = " << limit;
  return {false, os.str()};
}

}  // namespace dsgd
