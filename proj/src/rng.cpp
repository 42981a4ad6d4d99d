#include "ssp/rng.hpp"

#include <cmath>
#include <cstdlib>

#include "ssp/common.hpp"

namespace ssp {

namespace {

// log( f(k) / f(m) ) for f(j) = C(n,j) r^j, any fixed r > 0 with log r given
double log_pmf_ratio(long n, long k, long m, double logr) {
  return std::lgamma(static_cast<double>(m + 1)) +
         std::lgamma(static_cast<double>(n - m + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1)) +
         static_cast<double>(k - m) * logr;
}

// sequential search from k = 0; valid (and fast) while n*p is small, where
// q^n cannot underflow
long binomial_inversion(long n, double p, RngStream& rng) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double f0 = std::exp(static_cast<double>(n) * std::log(q));
  for (;;) {
    double u = rng.u01();
    double f = f0;
    for (long k = 0; k <= n; ++k) {
      if (u <= f) return k;
      u -= f;
      f *= s * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    // u leaked past the summed pmf by rounding; redraw
  }
}

// Hormann's BTRD for p <= 1/2 and n*p >= 10.  The two squeeze tests of the
// original are replaced by the exact acceptance comparison, which keeps the
// sampler exact as long as the hat dominates (guaranteed on this domain).
long btrd(long n, double p, RngStream& rng) {
  const double np = static_cast<double>(n) * p;
  const long m = static_cast<long>(std::floor((static_cast<double>(n) + 1.0) * p));
  const double r = p / (1.0 - p);
  const double logr = std::log(r);
  const double nr = (static_cast<double>(n) + 1.0) * r;
  const double sq = std::sqrt(np * (1.0 - p));
  const double b = 1.15 + 2.53 * sq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = np + 0.5;
  const double alpha = (2.83 + 5.1 / b) * sq;
  const double vr = 0.92 - 4.2 / b;
  for (;;) {
    double v = rng.u01();
    double u;
    if (v <= 0.86 * vr) {
      u = v / vr - 0.43;
      return static_cast<long>(
          std::floor((2.0 * a / (0.5 - std::abs(u)) + b) * u + c));
    }
    if (v >= vr) {
      u = rng.u01() - 0.5;
    } else {
      u = v / vr - 0.93;
      u = (u < 0.0 ? -0.5 : 0.5) - u;
      v = vr * rng.u01();
    }
    const double us = 0.5 - std::abs(u);
    const long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + c));
    if (k < 0 || k > n) continue;
    v = v * alpha / (a / (us * us) + b);
    const long km = std::labs(k - m);
    if (km <= 15) {
      double f = 1.0;
      if (k > m) {
        for (long i = m + 1; i <= k; ++i)
          f *= (nr / static_cast<double>(i) - r);
      } else if (k < m) {
        for (long i = k + 1; i <= m; ++i)
          v *= (nr / static_cast<double>(i) - r);
      }
      if (v <= f) return k;
    } else {
      if (std::log(v) <= log_pmf_ratio(n, k, m, logr)) return k;
    }
  }
}

}  // namespace

long binomial_draw(long n, double p, RngStream& rng) {
  if (n < 0 || !(p >= 0.0) || !(p <= 1.0))
    throw GateError("binomial_draw: need n >= 0 and p in [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial_draw(n, 1.0 - p, rng);
  if (static_cast<double>(n) * p < 10.0) return binomial_inversion(n, p, rng);
  return btrd(n, p, rng);
}

}  // namespace ssp
