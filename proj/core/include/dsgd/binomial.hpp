// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dsgd/rng.hpp"
#include "dsgd/types.hpp"

namespace dsgd {

/// Below this mean (n * min(p, 1-p)) draws use sequential-search inversion;
/// at or above it, BTPE.
inline constexpr double kBinomialInversionThreshold = 30.0;

/// Exact Binomial(n, p) draw.
///
/// Small means use inversion by sequential search over the pmf recurrence
/// (restarting if the search runs more than 10 standard deviations past the
/// mean, a region of probability below 1e-20). Larger means use the BTPE
/// acceptance/rejection algorithm of Kachitvichyanukul & Schmeiser (1988).
/// No normal approximation is ever used. p is clamped to [0, 1].
Count binomial(Count n, double p, Rng& rng);

/// Exact log of the Binomial(n, p) probability mass at k, via lgamma.
double binomial_log_pmf(Count n, double p, Count k);

}  // namespace dsgd
