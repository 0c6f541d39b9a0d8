// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "dsgd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dsgd {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Welford running mean and variance.
struct RunningStats {
  Count n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  double standard_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double rounding_slack(double a, double b) {
  return 64.0 * kEps * std::max(std::abs(a), std::abs(b));
}

TheoryConstants zim_constants(Count n, double c, std::size_t d, double L, double F_inf) {
  if (n < 1 || !(c > 0.0) || d < 1 || !(L >= 0.0)) {
    throw std::invalid_argument("zim_constants: need n >= 1, c > 0, d >= 1, L >= 0");
  }
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  TheoryConstants k;
  k.L = L;
  k.F_inf = F_inf;
  k.mu = nd / (std::sqrt(dd) * L + c * dd);
  k.M = nd;
  k.M_G = nd * nd - nd;
  return k;
}

double asymptotic_floor(const TheoryConstants& consts) { return consts.L * consts.M / consts.mu; }

double zim_floor(double L, std::size_t d, double c) {
  const double dd = static_cast<double>(d);
  return L * (std::sqrt(dd) * L + c * dd);
}

BoldComparison bold_comparison(double L, std::size_t d, double c) {
  const double dd = static_cast<double>(d);
  BoldComparison out;
  out.ours = std::sqrt(dd) * L * L + c * dd * L;
  out.bold_scaling = dd * L;
  out.bold_estimate = kBoldScale * dd * L;
  if (L == 17.0 && d == 79400) out.bold_reported = kBoldReportedExample;
  return out;
}

double bold_crossover_lipschitz(std::size_t d, double c, double scale) {
  // ours - bold = L (sqrt(d) L + c d - scale d); the bracket term is increasing in L.
  const double dd = static_cast<double>(d);
  auto excess = [&](double L) { return std::sqrt(dd) * L + c * dd - scale * dd; };
  if (excess(0.0) >= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 4.0 * kEps * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BoundReport bound_report(const TheoryConstants& consts, double alpha, Count K, double f_gap,
                         double observed) {
  if (K < 1) throw std::invalid_argument("bound_report: K must be >= 1");
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw BoundNotApplicable("bound_report: alpha must lie in (0, 1]");
  }
  const ZimConfig probe(1, alpha, 1.0);
  if (const auto verdict = validate_config(probe, consts); !verdict) {
    throw BoundNotApplicable("bound_report: " + verdict.violation);
  }
  BoundReport r;
  r.transient = 2.0 * f_gap / (static_cast<double>(K) * consts.mu * alpha);
  r.floor = asymptotic_floor(consts);
  r.total = r.transient + r.floor;
  r.observed = observed;
  r.satisfied = observed <= r.total;
  return r;
}

BoundReport evaluate_bound(const Trace& trace, const TheoryConstants& consts, double alpha,
                           Count K, double f1, double f_inf) {
  return bound_report(consts, alpha, K, f1 - f_inf, trace.final_state.running_mean_grad_sq);
}

InequalityCheck check_dot_bound(const GradientVector& grad, const ZimConfig& cfg,
                                const TheoryConstants& consts) {
  const auto moments = closed_form_moments(grad, cfg);
  InequalityCheck out;
  out.lhs = dot(grad.values(), moments.mean);
  out.rhs = cfg.r() * consts.mu * grad.sq_norm();
  out.holds = out.lhs >= out.rhs - rounding_slack(out.lhs, out.rhs);
  const double bound = std::sqrt(static_cast<double>(grad.dim())) * consts.L;
  out.in_regime = grad.l1_norm() <= bound * (1.0 + 64.0 * kEps);
  return out;
}

InequalityCheck check_moment_bound(const GradientVector& grad, const ZimConfig& cfg,
                                   const TheoryConstants& consts) {
  const auto moments = closed_form_moments(grad, cfg);
  const double r = cfg.r();
  const double g2 = grad.sq_norm();
  InequalityCheck out;
  out.lhs = moments.second_moment_sq_norm;
  out.rhs = r * consts.M + r * r * consts.M_G * g2;
  out.holds = out.lhs <= out.rhs + rounding_slack(out.lhs, out.rhs);
  const auto q = build_probabilities(grad, cfg.c());
  out.in_regime = consts.M_G == 0.0 || q.sum_of_squares() <= g2;
  return out;
}

DescentCheck check_descent_lemma(const Objective& objective, std::span<const double> w,
                                 const ZimConfig& cfg, const TheoryConstants& consts,
                                 Count samples, Rng& rng) {
  if (samples < kMinDescentSamples) {
    throw std::invalid_argument("check_descent_lemma: need at least " +
                                std::to_string(kMinDescentSamples) + " samples");
  }
  check_same_dim("check_descent_lemma", objective.dim(), w.size());
  std::vector<double> g(w.size());
  const double f0 = objective.value_and_gradient(w, g);
  const GradientVector grad(g);

  RunningStats stats;
  std::vector<double> next(w.begin(), w.end());
  for (Count s = 0; s < samples; ++s) {
    const UpdateVector u = zim_update(grad, cfg, rng);
    for (std::size_t i = 0; i < w.size(); ++i) next[i] = w[i] - static_cast<double>(u[i]);
    stats.add(objective.value(next) - f0);
  }

  const double alpha = cfg.r();
  const double L = consts.L;
  DescentCheck out;
  out.lhs_estimate = stats.mean;
  out.standard_error = stats.standard_error();
  out.rhs = -(consts.mu - 0.5 * alpha * L * consts.M_G) * alpha * grad.sq_norm() +
            0.5 * alpha * L * consts.M;
  out.margin = out.rhs + kStandardErrorBand * out.standard_error - out.lhs_estimate;
  out.holds = out.margin >= -rounding_slack(out.lhs_estimate, out.rhs);
  return out;
}

double identity_quadratic_expected_change(const GradientVector& grad, const ZimConfig& cfg) {
  const auto m = closed_form_moments(grad, cfg);
  return -dot(grad.values(), m.mean) + 0.5 * m.second_moment_sq_norm;
}

double finite_diff_gradcheck(const Objective& objective, std::span<const double> w, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradcheck: h must be > 0");
  check_same_dim("finite_diff_gradcheck", objective.dim(), w.size());
  const auto analytic = objective.gradient(w);
  std::vector<double> probe(w.begin(), w.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    probe[i] = w[i] + h;
    const double up = objective.value(probe);
    probe[i] = w[i] - h;
    const double down = objective.value(probe);
    probe[i] = w[i];
    const double fd = (up - down) / (2.0 * h);
    const double scale = std::max({1.0, std::abs(fd), std::abs(analytic[i])});
    worst = std::max(worst, std::abs(fd - analytic[i]) / scale);
  }
  return worst;
}

double estimate_lipschitz(const LinearMap& hessian, double rel_tol, int max_iterations) {
  const std::size_t d = hessian.dim;
  if (d == 0 || !hessian.apply) throw std::invalid_argument("estimate_lipschitz: empty operator");
  std::vector<double> v(d);
  std::vector<double> hv(d);
  Rng rng(0x1175c417ULL);
  for (auto& x : v) x = rng.normal();
  double norm = std::sqrt(dot(v, v));
  for (auto& x : v) x /= norm;

  for (int it = 0; it < max_iterations; ++it) {
    hessian.apply(v, hv);
    const double lambda = dot(v, hv);
    double residual = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double e = hv[i] - lambda * v[i];
      residual += e * e;
    }
    residual = std::sqrt(residual);
    norm = std::sqrt(dot(hv, hv));
    if (norm == 0.0) return 0.0;
    if (residual <= rel_tol * std::abs(lambda)) return lambda;
    for (std::size_t i = 0; i < d; ++i) v[i] = hv[i] / norm;
  }
  throw NonConvergence("estimate_lipschitz: power iteration did not converge in " +
                       std::to_string(max_iterations) + " iterations");
}

MomentEstimate estimate_zim_moments(Count n, const ProbabilityVector& p, Count samples, Rng& rng,
                                    std::span<const int> signs, const ZimSampler& sampler) {
  if (samples < 2) throw std::invalid_argument("estimate_zim_moments: need >= 2 samples");
  const std::size_t d = p.size() - 1;
  if (!signs.empty()) check_same_dim("estimate_zim_moments signs", d, signs.size());
  std::vector<RunningStats> coord(d);
  RunningStats sq;
  for (Count s = 0; s < samples; ++s) {
    const UpdateVector y = sampler(n, p, rng);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double v = static_cast<double>(signs.empty() ? y[i] : y[i] * signs[i]);
      coord[i].add(v);
      norm2 += v * v;
    }
    sq.add(norm2);
  }
  MomentEstimate out;
  out.samples = samples;
  out.mean.resize(d);
  out.mean_se.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.mean[i] = coord[i].mean;
    out.mean_se[i] = coord[i].standard_error();
  }
  out.sq_norm = sq.mean;
  out.sq_norm_se = sq.standard_error();
  return out;
}

ZimMoments enumerate_zim_moments(Count n, const ProbabilityVector& p, std::span<const int> signs) {
  const std::size_t slots = p.size();
  const std::size_t d = slots - 1;
  if (!signs.empty()) check_same_dim("enumerate_zim_moments signs", d, signs.size());
  if (n > 40) throw std::invalid_argument("enumerate_zim_moments: n too large to enumerate");

  std::vector<double> log_fact(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::size_t k = 1; k < log_fact.size(); ++k) {
    log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));
  }

  ZimMoments out;
  out.mean.assign(d, 0.0);
  std::vector<Count> x(slots, 0);

  // Visit every composition of n into `slots` parts.
  auto visit = [&](auto&& self, std::size_t slot, Count left) -> void {
    if (slot + 1 == slots) {
      x[slot] = left;
      double prob = 1.0;
      double log_coeff = log_fact[static_cast<std::size_t>(n)];
      for (std::size_t i = 0; i < slots; ++i) {
        log_coeff -= log_fact[static_cast<std::size_t>(x[i])];
        if (x[i] > 0) {
          if (p[i] == 0.0) return;
          prob *= std::pow(p[i], static_cast<double>(x[i]));
        }
      }
      prob *= std::exp(log_coeff);
      double norm2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double v = static_cast<double>(signs.empty() ? x[i + 1] : x[i + 1] * signs[i]);
        out.mean[i] += prob * v;
        norm2 += v * v;
      }
      out.second_moment_sq_norm += prob * norm2;
      return;
    }
    for (Count k = 0; k <= left; ++k) {
      x[slot] = k;
      self(self, slot + 1, left - k);
    }
  };
  visit(visit, 0, n);
  return out;
}

}  // namespace dsgd
