// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Theory side of the discrete update: ZIM constants, the fixed-rate
// convergence bound, the update-bound inequalities, the per-step descent
// lemma, and the numerical helpers (gradcheck, power iteration, Monte Carlo
// moment estimation, exact enumeration) used to check them.
//
// Inequalities that are theorems are checked with zero tolerance plus a
// rounding slack of 64 ulp of the larger side. Monte Carlo claims use a band
// of 4 standard errors.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dsgd/objectives.hpp"
#include "dsgd/optimizer.hpp"
#include "dsgd/rng.hpp"
#include "dsgd/sampler.hpp"
#include "dsgd/types.hpp"

namespace dsgd {

inline constexpr double kStandardErrorBand = 4.0;

/// 64 * eps * max(|a|, |b|).
double rounding_slack(double a, double b);

/// mu = n / (sqrt(d) L + c d), M = n, M_G = n^2 - n.
TheoryConstants zim_constants(Count n, double c, std::size_t d, double L, double F_inf = 0.0);

/// L * M / mu.
double asymptotic_floor(const TheoryConstants& consts);
/// L (sqrt(d) L + c d): the ZIM floor written without n.
double zim_floor(double L, std::size_t d, double c);

/// BOLD's reported bound for the 784-100-10 MNIST network (L = 17, d = 79400).
inline constexpr double kBoldReportedExample = 2.7e6;
/// BOLD's bound modelled as kBoldScale * d * L; 2 * 79400 * 17 = 2.6996e6.
inline constexpr double kBoldScale = 2.0;

struct BoldComparison {
  double ours = 0.0;           // sqrt(d) L^2 + c d L
  double bold_scaling = 0.0;   // d L
  double bold_estimate = 0.0;  // kBoldScale * d L
  /// kBoldReportedExample when (L, d) is the published example, else empty.
  std::optional<double> bold_reported;
};

BoldComparison bold_comparison(double L, std::size_t d, double c);

/// Smallest L > 0 at which ours == scale * d * L, by bisection.
double bold_crossover_lipschitz(std::size_t d, double c, double scale = kBoldScale);

struct BoundReport {
  double transient = 0.0;  // 2 (F(w_1) - F_inf) / (K mu alpha)
  double floor = 0.0;      // L M / mu
  double total = 0.0;
  double observed = 0.0;   // mean of ||grad F(w_k)||^2 over k = 1..K
  bool satisfied = false;
};

/// The bound is inapplicable to the given learning rate.
class BoundNotApplicable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bound terms for a fixed rate alpha; throws BoundNotApplicable unless
/// 0 < alpha <= mu / (L M_G).
BoundReport bound_report(const TheoryConstants& consts, double alpha, Count K, double f_gap,
                         double observed);

/// bound_report with observed = trace.final_state.running_mean_grad_sq.
BoundReport evaluate_bound(const Trace& trace, const TheoryConstants& consts, double alpha,
                           Count K, double f1, double f_inf);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  /// False when the input is outside the regime the inequality is proven for.
  bool in_regime = true;
};

/// grad . E[g_bar] >= r mu ||grad||^2 from closed-form moments. Inputs with
/// ||grad||_1 > sqrt(d) L are flagged out of regime, not rejected.
InequalityCheck check_dot_bound(const GradientVector& grad, const ZimConfig& cfg,
                                const TheoryConstants& consts);

/// E||g_bar||^2 <= r M + r^2 M_G ||grad||^2 from closed-form moments. Not a
/// theorem for every input: fails when sum q_i^2 > ||grad||^2 and n > 1.
InequalityCheck check_moment_bound(const GradientVector& grad, const ZimConfig& cfg,
                                   const TheoryConstants& consts);

struct DescentCheck {
  double lhs_estimate = 0.0;    // Monte Carlo E[F(w - g_bar)] - F(w)
  double standard_error = 0.0;
  double rhs = 0.0;             // -(mu - alpha L M_G / 2) alpha ||grad||^2 + alpha L M / 2
  double margin = 0.0;          // rhs + 4 SE - lhs_estimate
  bool holds = false;
};

inline constexpr Count kMinDescentSamples = 1000;

/// Per-step expected-decrease inequality with alpha = cfg.r(), unit lattice
/// step, N independent ZIM draws at w. Throws for N < kMinDescentSamples.
DescentCheck check_descent_lemma(const Objective& objective, std::span<const double> w,
                                 const ZimConfig& cfg, const TheoryConstants& consts,
                                 Count samples, Rng& rng);

/// Exact E[F(w - g_bar)] - F(w) = -grad . E[g_bar] + E||g_bar||^2 / 2 for an
/// objective with identity Hessian.
double identity_quadratic_expected_change(const GradientVector& grad, const ZimConfig& cfg);

/// Max over coordinates of |fd - analytic| / max(1, |fd|, |analytic|), with
/// central differences of step h.
double finite_diff_gradcheck(const Objective& objective, std::span<const double> w, double h);

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest eigenvalue of a symmetric PSD operator by power iteration. Stops
/// once the residual ||Hv - lambda v|| <= rel_tol * lambda.
double estimate_lipschitz(const LinearMap& hessian, double rel_tol = 1e-6,
                          int max_iterations = 10000);

/// Sample statistics of ZIM draws.
struct MomentEstimate {
  std::vector<double> mean;
  std::vector<double> mean_se;
  double sq_norm = 0.0;
  double sq_norm_se = 0.0;
  Count samples = 0;
};

/// Moments of sample_zim (signs empty) or of the signed update x * signs.
MomentEstimate estimate_zim_moments(Count n, const ProbabilityVector& p, Count samples, Rng& rng,
                                    std::span<const int> signs = {},
                                    const ZimSampler& sampler = sample_zim);

/// Exact moments of x * signs, x ~ Multinomial(n, p) restricted to slots
/// 1..d, by summing over every outcome with its multinomial probability.
/// Feasible for small n and d only.
ZimMoments enumerate_zim_moments(Count n, const ProbabilityVector& p,
                                 std::span<const int> signs = {});

}  // namespace dsgd
