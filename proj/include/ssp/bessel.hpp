#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ssp/common.hpp"
#include "ssp/rng.hpp"

namespace ssp {

// Squared Bessel process of dimension 4*delta, delta in (0, 1/4):
//   dZ = 2 sqrt(Z) dbeta + 4*delta dt.
// Started from 0 its transition density is the Gamma(2*delta, 2t) density,
// it hits zero, and its zero set has box dimension 1 - 2*delta.

// q_t(0, y) = y^{2d-1} exp(-y/2t) / (Gamma(2d) (2t)^{2d}), d = 2*delta
double besq_density(double delta, double t, double y);

// T0-density normalization c_delta = 2^{2delta-1} / Gamma(1-2delta):
// substituting u = y/(2s) in the first-passage survival integral
// int_tau^inf c_delta y^{1-2delta} s^{2delta-2} e^{-y/2s} ds turns it into
// the normalized lower incomplete gamma function, which fixes c_delta by
// t0_survival(delta, y, 0) = 1.
double t0_constant(double delta);

// P(T0 > tau) for the squared Bessel process started at y > 0
// = gamma_p(1 - 2delta, y / (2 tau)).  Gate: delta < 1/2 (divergent above).
double t0_survival(double delta, double y, double tau);

enum class ZeroGapRoute { nested, reduced };

// P(Zeros(Z) meets (a,b) empty | Z_0 = 0).  nested: outer quadrature of
// t0_survival against the Gamma(2delta, 2a) marginal; reduced: the exact
// single integral (sin(2 pi delta)/pi) int_{(b-a)/a}^inf v^{2delta-1}/(1+v) dv
// obtained by Fubini and the Gamma reflection identity.
double zero_gap_probability(double a, double b, double delta,
                            ZeroGapRoute route = ZeroGapRoute::reduced);

enum class ZeroGapMcMode { euler, euler_bridge, exact_resample };

struct ZeroGapMc {
  double hit_fraction = 0.0;  // estimate of P(zero set meets (a,b))
  double se = 0.0;
  long n_paths = 0;
};

// Monte Carlo companion of zero_gap_probability: exact Gamma transition to
// time a, then the interval (a,b).  euler flags only grid touches of the
// Euler path (biased low by sub-grid zeros; kept as a diagnostic);
// euler_bridge adds a Brownian-bridge hitting coin for sqrt(Z) between grid
// points (sqrt(Z) has unit diffusion coefficient, so the standard bridge
// minimum law applies); exact_resample replaces the path with the
// closed-form T0 survival evaluated at the exact Z_a draw.
ZeroGapMc zero_gap_mc(double delta, double a, double b, long n_paths,
                      double dt, ZeroGapMcMode mode, std::uint64_t seed);

struct Lemma23Row {
  double a;
  double b;
  double ratio;  // I * a^{2delta-1} (b-a)^{1-2delta}
};

struct Lemma23Report {
  double delta;
  std::vector<Lemma23Row> rows;
  double fitted;          // sup of ratio over the grid
  double fitted_refined;  // same at deeper quadrature
  bool stable;
};

// Fitted constant for I <= C a^{1-2delta} (b-a)^{2delta-1} over the grid
// of (a, a+gap) pairs; refinement doubles quadrature depth.
Lemma23Report lemma23_bound_check(double delta,
                                  const std::vector<double>& a_grid,
                                  const std::vector<double>& gap_grid);

struct ZeroSet {
  double dt = 0.0;
  std::vector<char> flags;  // per step: post-step state truncated to 0
  std::vector<std::pair<double, double>> intervals;  // maximal zero runs
};

struct BesqPath {
  double dt = 0.0;
  std::vector<double> values;  // values[k] = Z(k*dt)
  ZeroSet zeros;
};

// Euler path from 0 with nonnegativity truncation; zero flags where the
// pre-truncation state is <= 0.
BesqPath simulate_besq(double delta, double T, double dt, RngStream& rng);

// Exact transition over h: Z' ~ Gamma(2delta + J, 2h), J ~ Poisson(z/(2h))
// (noncentral chi-square mixture); for distribution checks only.
double besq_exact_step(double delta, double z, double h, RngStream& rng);

struct DimensionEstimate {
  double slope = 0.0;
  bool unreliable = true;
  std::vector<double> scales;
  std::vector<long> counts;
};

// Box-counting slope of log(count) vs log(1/scale) for the zero set
// restricted to (window_lo, window_hi).  Needs >= 4 scales spanning >= 2
// decades; flagged unreliable when boxes are too few.
DimensionEstimate box_dimension(const ZeroSet& zeros, double window_lo,
                                double window_hi,
                                const std::vector<double>& scales);

}  // namespace ssp
