// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training loops for the discrete ZIM update (w <- w - delta * g_bar) and a
// plain SGD baseline.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dsgd/objectives.hpp"
#include "dsgd/rng.hpp"
#include "dsgd/sampler.hpp"
#include "dsgd/types.hpp"

namespace dsgd {

/// Non-finite objective or gradient during training.
class NumericError : public std::runtime_error {
 public:
  NumericError(Count step, const std::string& what);
  Count step() const { return step_; }

 private:
  Count step_;
};

/// Training configuration rejected before any step was taken.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SgdConfig {
  double lr = 0.1;
};

using Method = std::variant<ZimConfig, SgdConfig>;

std::string method_name(const Method& method);

struct TrainConfig {
  Count steps = 1;  // K
  std::vector<std::uint64_t> seeds{0};
  Count log_every = 1;
  std::optional<std::size_t> batch_size;
  /// When present, ZIM runs must satisfy validate_config.
  std::optional<TheoryConstants> theory;

  void validate() const;
};

/// Number of consecutive all-zero updates that raises the stagnation flag.
inline constexpr Count kStagnationRun = 50;

/// Random streams derived from one user seed.
inline constexpr std::uint64_t kDataOrderStream = 1;
inline constexpr std::uint64_t kUpdateStream = 2;

struct Trace {
  std::uint64_t seed = 0;
  std::string method;
  /// Records for k = 1, 1 + log_every, 1 + 2 log_every, ... <= K. Record k
  /// holds F(w_k), ||grad F(w_k)||^2 and the size of the update applied at step k.
  std::vector<StepRecord> records;
  /// State after the last update (k = K + 1); update_l1 is 0.
  StepRecord final_state;
  std::vector<double> final_weights;
  std::string config_echo;
  /// First step at which kStagnationRun consecutive zero updates were seen.
  std::optional<Count> stagnation_step;
};

/// Optional per-log evaluation, e.g. held-out accuracy.
using WeightsMetric = std::function<double(std::span<const double>)>;

struct TrainHooks {
  WeightsMetric accuracy;
  std::string config_echo;
  ZimSampler sampler;  // defaults to sample_zim
};

struct ZimStepResult {
  LatticeWeights weights;
  UpdateVector update;
};

/// coords += g_bar where g_bar = zim_update(grad, cfg, rng); realised weights
/// move by -delta * g_bar. The weights' delta is used, not cfg.delta().
ZimStepResult zim_step(LatticeWeights weights, const GradientVector& grad, const ZimConfig& cfg,
                       Rng& rng);

/// w - lr * grad.
std::vector<double> sgd_step(std::span<const double> w, const GradientVector& grad, double lr);

/// One seeded run. ZIM runs start the lattice at `initial_weights` with step
/// cfg.delta(). Full-batch objectives log the running mean over every step;
/// with batch_size set, the full gradient is computed only at logged steps and
/// the running mean is over those steps.
Trace train(const Objective& objective, const Method& method, const TrainConfig& cfg,
            std::span<const double> initial_weights, std::uint64_t seed,
            const TrainHooks& hooks = {});

using InitialWeightsFn = std::function<std::vector<double>(std::uint64_t seed)>;

/// train() for every seed in cfg.seeds, up to `workers` at a time. Results are
/// in seed order.
std::vector<Trace> train_seeds(const Objective& objective, const Method& method,
                               const TrainConfig& cfg, const InitialWeightsFn& initial_weights,
                               unsigned workers = 1, const TrainHooks& hooks = {});

/// ceil(examples / batch) * epochs.
Count epochs_to_steps(std::size_t examples, std::size_t batch, Count epochs);

}  // namespace dsgd
