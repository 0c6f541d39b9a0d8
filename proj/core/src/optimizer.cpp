// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "dsgd/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace dsgd {
namespace {

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double sq_norm(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x * x;
  return s;
}

// Per-epoch shuffled minibatches drawn from the data-order stream.
class BatchSchedule {
 public:
  BatchSchedule(std::size_t examples, std::size_t batch, std::uint64_t seed)
      : order_(examples), batch_(batch), rng_(seed, kDataOrderStream) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  std::span<const std::size_t> next() {
    if (cursor_ >= order_.size() || cursor_ == 0) {
      if (cursor_ >= order_.size()) cursor_ = 0;
      for (std::size_t i = order_.size(); i > 1; --i) {
        std::swap(order_[i - 1], order_[rng_.below(i)]);
      }
    }
    const std::size_t len = std::min(batch_, order_.size() - cursor_);
    std::span<const std::size_t> out(order_.data() + cursor_, len);
    cursor_ += len;
    return out;
  }

 private:
  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

}  // namespace

NumericError::NumericError(Count step, const std::string& what)
    : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

std::string method_name(const Method& method) {
  return std::holds_alternative<ZimConfig>(method) ? "zim" : "sgd";
}

void TrainConfig::validate() const {
  if (steps < 1) throw ConfigError("train: steps (K) must be >= 1");
  if (seeds.empty()) throw ConfigError("train: at least one seed required");
  if (log_every < 1) throw ConfigError("train: log_every must be >= 1");
  if (batch_size && *batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
}

Count epochs_to_steps(std::size_t examples, std::size_t batch, Count epochs) {
  if (batch == 0) throw ConfigError("epochs_to_steps: batch must be >= 1");
  const auto per_epoch = static_cast<Count>((examples + batch - 1) / batch);
  return per_epoch * epochs;
}

ZimStepResult zim_step(LatticeWeights weights, const GradientVector& grad, const ZimConfig& cfg,
                       Rng& rng) {
  check_same_dim("zim_step", weights.dim(), grad.dim());
  UpdateVector update = zim_update(grad, cfg, rng);
  weights.apply(update);
  return {std::move(weights), std::move(update)};
}

std::vector<double> sgd_step(std::span<const double> w, const GradientVector& grad, double lr) {
  check_same_dim("sgd_step", w.size(), grad.dim());
  std::vector<double> out(w.begin(), w.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= lr * grad[i];
  return out;
}

Trace train(const Objective& objective, const Method& method, const TrainConfig& cfg,
            std::span<const double> initial_weights, std::uint64_t seed,
            const TrainHooks& hooks) {
  cfg.validate();
  const std::size_t d = objective.dim();
  check_same_dim("train initial weights", d, initial_weights.size());

  const ZimConfig* zim = std::get_if<ZimConfig>(&method);
  const SgdConfig* sgd = std::get_if<SgdConfig>(&method);
  if (zim != nullptr && cfg.theory) {
    if (const auto verdict = validate_config(*zim, *cfg.theory); !verdict) {
      throw ConfigError("train: " + verdict.violation);
    }
  }
  if (sgd != nullptr && !(sgd->lr >= 0.0)) throw ConfigError("train: lr must be >= 0");

  const bool minibatch = cfg.batch_size.has_value() && objective.num_examples() > 0;
  std::optional<BatchSchedule> batches;
  if (minibatch) batches.emplace(objective.num_examples(), *cfg.batch_size, seed);

  Rng rng(seed, kUpdateStream);
  const ZimSampler& sampler = hooks.sampler ? hooks.sampler : ZimSampler(sample_zim);

  std::vector<double> w(initial_weights.begin(), initial_weights.end());
  std::optional<LatticeWeights> lattice;
  if (zim != nullptr) lattice.emplace(w, zim->delta());

  Trace trace;
  trace.seed = seed;
  trace.method = method_name(method);
  trace.config_echo = hooks.config_echo;
  trace.records.reserve(static_cast<std::size_t>(cfg.steps / cfg.log_every + 1));

  std::vector<double> grad(d);
  std::vector<double> full_grad(d);
  double grad_sq_sum = 0.0;
  Count grad_sq_terms = 0;
  Count zero_run = 0;

  auto full_eval = [&](Count k, std::span<double> g) {
    const double f = objective.value_and_gradient(w, g);
    if (!std::isfinite(f)) throw NumericError(k, "non-finite objective");
    if (!all_finite(g)) throw NumericError(k, "non-finite gradient");
    return f;
  };

  for (Count k = 1; k <= cfg.steps; ++k) {
    const bool log = (k - 1) % cfg.log_every == 0;
    StepRecord rec;
    rec.k = k;

    if (!minibatch) {
      rec.objective = full_eval(k, grad);
      rec.grad_sq_norm = sq_norm(grad);
      grad_sq_sum += rec.grad_sq_norm;
      ++grad_sq_terms;
    } else {
      const auto batch = batches->next();
      const double fb = objective.batch_value_and_gradient(w, batch, grad);
      if (!std::isfinite(fb)) throw NumericError(k, "non-finite minibatch objective");
      if (!all_finite(grad)) throw NumericError(k, "non-finite minibatch gradient");
      if (log) {
        rec.objective = full_eval(k, full_grad);
        rec.grad_sq_norm = sq_norm(full_grad);
        grad_sq_sum += rec.grad_sq_norm;
        ++grad_sq_terms;
      }
    }
    if (log) {
      rec.running_mean_grad_sq = grad_sq_sum / static_cast<double>(grad_sq_terms);
      if (hooks.accuracy) rec.accuracy = hooks.accuracy(w);
    }

    bool moved = false;
    if (zim != nullptr) {
      const GradientVector g(grad);
      const UpdateVector update = zim_update(g, *zim, rng, sampler);
      lattice->apply(update);
      const auto steps = update.steps();
      for (std::size_t i = 0; i < d; ++i) {
        if (steps[i] != 0) w[i] = lattice->weight(i);
      }
      rec.update_l1 = static_cast<double>(update.l1_norm());
      moved = rec.update_l1 > 0.0;
    } else {
      double l1 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double step = sgd->lr * grad[i];
        w[i] -= step;
        l1 += std::abs(step);
      }
      rec.update_l1 = l1;
      moved = l1 > 0.0;
    }

    zero_run = moved ? 0 : zero_run + 1;
    if (zero_run >= kStagnationRun && !trace.stagnation_step) trace.stagnation_step = k;

    if (log) trace.records.push_back(rec);
  }

  StepRecord& fin = trace.final_state;
  fin.k = cfg.steps + 1;
  fin.objective = full_eval(cfg.steps + 1, full_grad);
  fin.grad_sq_norm = sq_norm(full_grad);
  fin.running_mean_grad_sq = grad_sq_sum / static_cast<double>(grad_sq_terms);
  if (hooks.accuracy) fin.accuracy = hooks.accuracy(w);
  trace.final_weights = std::move(w);
  return trace;
}

std::vector<Trace> train_seeds(const Objective& objective, const Method& method,
                               const TrainConfig& cfg, const InitialWeightsFn& initial_weights,
                               unsigned workers, const TrainHooks& hooks) {
  cfg.validate();
  std::vector<Trace> traces(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        const auto w1 = initial_weights(cfg.seeds[i]);
        traces[i] = train(objective, method, cfg, w1, cfg.seeds[i], hooks);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned n = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(cfg.seeds.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return traces;
}

}  // namespace dsgd
