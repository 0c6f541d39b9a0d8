// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "dsgd/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dsgd {
namespace {

// Requires p <= 0.5 and n * p < kBinomialInversionThreshold.
Count binomial_inversion(Count n, double p, Rng& rng) {
  const double q = 1.0 - p;
  const double qn = std::exp(static_cast<double>(n) * std::log1p(-p));
  const double np = static_cast<double>(n) * p;
  const double bound = std::min(static_cast<double>(n), np + 10.0 * std::sqrt(np * q + 1.0));

  Count x = 0;
  double px = qn;
  double u = rng.uniform();
  while (u > px) {
    ++x;
    if (static_cast<double>(x) > bound) {
      x = 0;
      px = qn;
      u = rng.uniform();
    } else {
      u -= px;
      px = (static_cast<double>(n - x + 1) * p * px) / (static_cast<double>(x) * q);
    }
  }
  return x;
}

// BTPE for p <= 0.5 and n * p >= kBinomialInversionThreshold.
Count binomial_btpe(Count n, double p, Rng& rng) {
  const double nd = static_cast<double>(n);
  const double r = p;
  const double q = 1.0 - r;
  const double fm = nd * r + r;
  const double m = std::floor(fm);
  const double p1 = std::floor(2.195 * std::sqrt(nd * r * q) - 4.6 * q) + 0.5;
  const double xm = m + 0.5;
  const double xl = xm - p1;
  const double xr = xm + p1;
  const double c = 0.134 + 20.5 / (15.3 + m);
  double a = (fm - xl) / (fm - xl * r);
  const double laml = a * (1.0 + a / 2.0);
  a = (xr - fm) / (xr * q);
  const double lamr = a * (1.0 + a / 2.0);
  const double p2 = p1 * (1.0 + 2.0 * c);
  const double p3 = p2 + c / laml;
  const double p4 = p3 + c / lamr;
  const double nrq = nd * r * q;

  for (;;) {
    const double u = rng.uniform() * p4;
    double v = rng.uniform();
    double y;

    if (u <= p1) {
      // Triangular centre region: accept immediately.
      return static_cast<Count>(std::floor(xm - p1 * v + u));
    }
    if (u <= p2) {
      const double x = xl + (u - p1) / c;
      v = v * c + 1.0 - std::abs(m - x + 0.5) / p1;
      if (v > 1.0 || v <= 0.0) continue;
      y = std::floor(x);
    } else if (u <= p3) {
      if (v == 0.0) continue;
      y = std::floor(xl + std::log(v) / laml);
      if (y < 0.0) continue;
      v = v * (u - p2) * laml;
    } else {
      if (v == 0.0) continue;
      y = std::floor(xr - std::log(v) / lamr);
      if (y > nd) continue;
      v = v * (u - p3) * lamr;
    }

    const double k = std::abs(y - m);
    if (k <= 20.0 || k >= nrq / 2.0 - 1.0) {
      // Explicit evaluation of f(y) / f(m) by the pmf recurrence.
      const double s = r / q;
      const double aa = s * (nd + 1.0);
      double f = 1.0;
      if (m < y) {
        for (double i = m + 1.0; i <= y; i += 1.0) f *= (aa / i - s);
      } else if (m > y) {
        for (double i = y + 1.0; i <= m; i += 1.0) f /= (aa / i - s);
      }
      if (v > f) continue;
      return static_cast<Count>(y);
    }

    // Squeeze on log(f(y) / f(m)), then the Stirling-corrected bound.
    const double rho =
        (k / nrq) * ((k * (k / 3.0 + 0.625) + 0.1666666666666667) / nrq + 0.5);
    const double t = -k * k / (2.0 * nrq);
    const double A = std::log(v);
    if (A < t - rho) return static_cast<Count>(y);
    if (A > t + rho) continue;

    const double x1 = y + 1.0;
    const double f1 = m + 1.0;
    const double z = nd + 1.0 - m;
    const double w = nd - y + 1.0;
    const double x2 = x1 * x1;
    const double f2 = f1 * f1;
    const double z2 = z * z;
    const double w2 = w * w;
    const double bound =
        xm * std::log(f1 / x1) + (nd - m + 0.5) * std::log(z / w) +
        (y - m) * std::log(w * r / (x1 * q)) +
        (13860. - (462. - (132. - (99. - 140. / f2) / f2) / f2) / f2) / f1 / 166320. +
        (13860. - (462. - (132. - (99. - 140. / z2) / z2) / z2) / z2) / z / 166320. +
        (13860. - (462. - (132. - (99. - 140. / x2) / x2) / x2) / x2) / x1 / 166320. +
        (13860. - (462. - (132. - (99. - 140. / w2) / w2) / w2) / w2) / w / 166320.;
    if (A > bound) continue;
    return static_cast<Count>(y);
  }
}

}  // namespace

Count binomial(Count n, double p, Rng& rng) {
  if (n <= 0 || !(p > 0.0)) return 0;
  if (p >= 1.0) return n;
  const bool flipped = p > 0.5;
  const double pp = flipped ? 1.0 - p : p;
  const Count x = static_cast<double>(n) * pp < kBinomialInversionThreshold
                      ? binomial_inversion(n, pp, rng)
                      : binomial_btpe(n, pp, rng);
  return flipped ? n - x : x;
}

double binomial_log_pmf(Count n, double p, Count k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
         kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

}  // namespace dsgd
