// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "dsgd/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "dsgd/binomial.hpp"

namespace dsgd {

ProbabilityVector build_probabilities(const GradientVector& grad, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvariantError("build_probabilities: smoothing c must be > 0");
  }
  const std::size_t d = grad.dim();
  const double denom = grad.l1_norm() + c * static_cast<double>(d);
  std::vector<double> q(d);
  for (std::size_t i = 0; i < d; ++i) q[i] = (std::abs(grad[i]) + c) / denom;
  return ProbabilityVector(std::move(q));
}

ProbabilityVector augment_with_zero_inflation(const ProbabilityVector& q, double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw InvariantError("augment_with_zero_inflation: r must lie in [0, 1]");
  }
  std::vector<double> p(q.size() + 1);
  p[0] = 1.0 - r;
  for (std::size_t i = 0; i < q.size(); ++i) p[i + 1] = r * q[i];
  return ProbabilityVector(std::move(p));
}

UpdateVector sample_zim(Count n, const ProbabilityVector& p, Rng& rng) {
  if (p.size() < 2) throw InvariantError("sample_zim: need at least one non-zero slot");
  const auto probs = p.probs();
  const std::size_t d = probs.size() - 1;
  std::vector<Count> counts(d, 0);

  Count remaining = n - binomial(n, probs[0], rng);
  // Tail mass is recomputed from the remaining entries rather than tracked by
  // subtraction, so late slots do not inherit cancellation error.
  double tail = 0.0;
  for (std::size_t i = 1; i <= d; ++i) tail += probs[i];

  for (std::size_t i = 1; i < d && remaining > 0; ++i) {
    if (!(tail > 0.0)) break;
    const double cond = std::min(1.0, probs[i] / tail);
    const Count x = binomial(remaining, cond, rng);
    counts[i - 1] = x;
    remaining -= x;
    tail -= probs[i];
    if (tail < 0.0) {
      tail = 0.0;
      for (std::size_t j = i + 1; j <= d; ++j) tail += probs[j];
    }
  }
  if (remaining > 0) {
    // Remaining trials belong to the last slot with positive mass.
    std::size_t last = d;
    while (last > 1 && probs[last] <= 0.0) --last;
    counts[last - 1] += remaining;
  }
  return {std::move(counts), n};
}

UpdateVector zim_update(const GradientVector& grad, const ZimConfig& cfg, Rng& rng) {
  return zim_update(grad, cfg, rng, sample_zim);
}

UpdateVector zim_update(const GradientVector& grad, const ZimConfig& cfg, Rng& rng,
                        const ZimSampler& sampler) {
  const auto q = build_probabilities(grad, cfg.c());
  const auto p = augment_with_zero_inflation(q, cfg.r());
  UpdateVector counts = sampler(cfg.n(), p, rng);
  check_same_dim("zim_update", grad.dim(), counts.dim());
  std::vector<Count> steps(counts.steps().begin(), counts.steps().end());
  for (std::size_t i = 0; i < steps.size(); ++i) steps[i] *= sign_of(grad[i]);
  return {std::move(steps), cfg.n()};
}

RawZimMoments raw_zim_moments(Count n, double r, const ProbabilityVector& q) {
  const double nd = static_cast<double>(n);
  RawZimMoments out;
  out.mean.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out.mean[i] = nd * r * q[i];
  out.sq_norm = nd * r + r * r * (nd * nd - nd) * q.sum_of_squares();
  return out;
}

ZimMoments closed_form_moments(const GradientVector& grad, const ZimConfig& cfg) {
  const double n = static_cast<double>(cfg.n());
  const double r = cfg.r();
  const double c = cfg.c();
  const std::size_t d = grad.dim();
  const double denom = grad.l1_norm() + c * static_cast<double>(d);

  ZimMoments out;
  out.mean.resize(d);
  double linear = 0.0;
  double quadratic = 0.0;
  bool any_zero = false;
  for (std::size_t i = 0; i < d; ++i) {
    const int s = sign_of(grad[i]);
    out.mean[i] = n * r * (grad[i] + c * s) / denom;
    if (s != 0) {
      const double qi = (std::abs(grad[i]) + c) / denom;
      linear += qi;
      quadratic += qi * qi;
    } else {
      any_zero = true;
    }
  }
  if (!any_zero) linear = 1.0;
  out.second_moment_sq_norm = n * r * linear + r * r * (n * n - n) * quadratic;
  return out;
}

}  // namespace dsgd
