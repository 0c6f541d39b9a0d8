// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Zero-inflated multinomial (ZIM) sampling and its closed-form moments.
//
// A ZIM draw spreads n trials over d + 1 slots. Slot 0 is the "no move" slot
// with probability 1 - r; slot i >= 1 has probability r * q_i. The draw returns
// the counts of slots 1..d. The ZIM update multiplies those counts by
// sign(grad), with q proportional to |grad| + c.

#pragma once

#include <functional>
#include <vector>

#include "dsgd/rng.hpp"
#include "dsgd/types.hpp"

namespace dsgd {

/// sign(0) is 0: a coordinate with exactly zero gradient never moves.
inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

/// q_i = (|grad_i| + c) / (||grad||_1 + c d). Throws InvariantError if c <= 0.
ProbabilityVector build_probabilities(const GradientVector& grad, double c);

/// p = (1 - r, r q_1, ..., r q_d).
ProbabilityVector augment_with_zero_inflation(const ProbabilityVector& q, double r);

/// Counts of slots 1..d of a Multinomial(n, p) draw, p augmented (length d + 1).
///
/// Uses the conditional-binomial decomposition: slot 0 first as
/// Binomial(n, p_0), then each later slot as a binomial on the remaining trials
/// with its probability renormalised by the remaining tail mass. The last slot
/// receives whatever trials are left.
UpdateVector sample_zim(Count n, const ProbabilityVector& p, Rng& rng);

/// Signature of a ZIM slot sampler; lets verification swap in a variant.
using ZimSampler = std::function<UpdateVector(Count, const ProbabilityVector&, Rng&)>;

/// One draw of the update x * sign(grad), x ~ ZIM(n, r, q(grad, c)).
UpdateVector zim_update(const GradientVector& grad, const ZimConfig& cfg, Rng& rng);
UpdateVector zim_update(const GradientVector& grad, const ZimConfig& cfg, Rng& rng,
                        const ZimSampler& sampler);

struct RawZimMoments {
  std::vector<double> mean;  // E[y_i] = n r q_i
  double sq_norm = 0.0;      // E[||y||^2] = n r + r^2 (n^2 - n) sum q_i^2
};

/// Moments of the unsigned ZIM draw y.
RawZimMoments raw_zim_moments(Count n, double r, const ProbabilityVector& q);

struct ZimMoments {
  std::vector<double> mean;              // E[update]
  double second_moment_sq_norm = 0.0;    // E[||update||^2]
};

/// Exact moments of zim_update.
///
///   mean = n r (grad + c sign(grad)) / (||grad||_1 + c d)
///   E||update||^2 = sum over i with grad_i != 0 of n p_i + n (n - 1) p_i^2
///
/// When no coordinate of grad is exactly zero the second line equals
/// n r + r^2 (n^2 - n) sum q_i^2. Zero coordinates contribute nothing because
/// sign(0) = 0.
ZimMoments closed_form_moments(const GradientVector& grad, const ZimConfig& cfg);

}  // namespace dsgd
