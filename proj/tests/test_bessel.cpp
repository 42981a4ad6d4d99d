#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ssp/bessel.hpp"
#include "ssp/common.hpp"
#include "ssp/rng.hpp"

using namespace ssp;

TEST_CASE("squared Bessel marginal density: frozen value and oracle") {
  // Gamma(2 delta, 2t) at delta = 0.1, t = 1, y = 1:
  // 2^{-0.2} e^{-0.5} / Gamma(0.2)
  const double frozen =
      std::pow(2.0, -0.2) * std::exp(-0.5) / std::tgamma(0.2);
  CHECK(besq_density(0.1, 1.0, 1.0) == doctest::Approx(frozen).epsilon(1e-14));
  for (double delta : {0.05, 0.1, 0.3}) {
    for (double t : {0.5, 1.0}) {
      for (double y : {0.2, 1.0, 3.7}) {
        CHECK(besq_density(delta, t, y) ==
              doctest::Approx(oracle::besq_density(delta, t, y))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("first-passage survival: normalization, monotonicity, gates") {
  CHECK_THROWS_AS(t0_survival(0.5, 1.0, 1.0), GateError);
  CHECK_THROWS_AS(t0_survival(0.6, 1.0, 1.0), GateError);
  const double delta = 0.1;
  // tau -> 0 gives survival 1 (c_delta normalization)
  CHECK(t0_survival(delta, 1.0, 1e-8) == doctest::Approx(1.0).epsilon(1e-6));
  double prev = 1.0;
  for (double tau : {0.1, 0.3, 1.0, 5.0, 50.0}) {
    const double s = t0_survival(delta, 1.0, tau);
    CHECK(s > 0.0);
    CHECK(s < prev);
    prev = s;
  }
  // independent route: survival = gammap(1 - 2 delta, y / (2 tau))
  for (double tau : {0.25, 1.0})
    CHECK(t0_survival(delta, 0.7, tau) ==
          doctest::Approx(oracle::gammap(0.8, 0.7 / (2.0 * tau)))
              .epsilon(1e-10));
  CHECK(t0_constant(delta) > 0.0);
}

TEST_CASE("zero-gap probability: both routes, frozen value, oracle") {
  const double delta = 0.1, a = 0.25, b = 0.5;
  const double nested = zero_gap_probability(a, b, delta, ZeroGapRoute::nested);
  const double reduced =
      zero_gap_probability(a, b, delta, ZeroGapRoute::reduced);
  CHECK(nested == doctest::Approx(reduced).epsilon(1e-6));
  CHECK(reduced ==
        doctest::Approx(oracle::kZeroGapQuarterHalfTenth).epsilon(1e-9));
  CHECK(reduced ==
        doctest::Approx(oracle::zero_gap(delta, a, b)).epsilon(1e-7));
  // another parameter point against the Simpson oracle
  CHECK(zero_gap_probability(0.4, 1.0, 0.2, ZeroGapRoute::reduced) ==
        doctest::Approx(oracle::zero_gap(0.2, 0.4, 1.0)).epsilon(1e-7));
}

TEST_CASE("zero-gap Monte Carlo: exact-resample agrees with the quadrature") {
  const double delta = 0.1, a = 0.25, b = 0.5;
  ZeroGapMc mc =
      zero_gap_mc(delta, a, b, 40000, 0.0, ZeroGapMcMode::exact_resample, 4);
  const double want = 1.0 - oracle::kZeroGapQuarterHalfTenth;
  CHECK(std::abs(mc.hit_fraction - want) < 3.0 * mc.se);
  CHECK(mc.se < 0.01);

  // bridge-corrected Euler at moderate resolution: remaining bias well under
  // the naive estimator's
  ZeroGapMc br =
      zero_gap_mc(delta, a, b, 20000, 4e-5, ZeroGapMcMode::euler_bridge, 5);
  CHECK(std::abs(br.hit_fraction - want) < 3.0 * br.se + 0.005);
  // grid-only flags miss sub-grid zeros; at a coarse grid the downward bias
  // is far outside Monte Carlo noise
  ZeroGapMc naive =
      zero_gap_mc(delta, a, b, 20000, 4e-3, ZeroGapMcMode::euler, 5);
  CHECK(naive.hit_fraction < want - 3.0 * naive.se);
  CHECK(naive.hit_fraction < br.hit_fraction);
}

TEST_CASE("exact transition step has the BESQ(4 delta) mean") {
  const double delta = 0.1, z0 = 0.7, h = 0.3;
  RngStream rng(9, 0);
  const int n = 100000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = besq_exact_step(delta, z0, h, rng);
    CHECK(z >= 0.0);
    acc += z;
    acc2 += z * z;
  }
  acc /= n;
  acc2 /= n;
  const double want = z0 + 4.0 * delta * h;  // E Z_h = z + d h with d = 4 delta
  const double sd = std::sqrt((acc2 - acc * acc) / n);
  CHECK(std::abs(acc - want) < 4.0 * sd);
}

TEST_CASE("simulated paths: zero flags and interval bookkeeping") {
  RngStream rng(12, 0);
  BesqPath path = simulate_besq(0.1, 1.0, 1e-4, rng);
  REQUIRE(!path.values.empty());
  CHECK(path.values.front() == 0.0);
  CHECK(path.dt == 1e-4);
  for (double v : path.values) CHECK(v >= 0.0);
  REQUIRE(!path.zeros.intervals.empty());
  for (const auto& [lo, hi] : path.zeros.intervals) {
    CHECK(lo <= hi);
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0 + 1e-12);
  }
  // BESQ(0.4) is point-recurrent: zeros exist away from the origin
  bool late_zero = false;
  for (const auto& [lo, hi] : path.zeros.intervals)
    if (hi > 0.25) late_zero = true;
  CHECK(late_zero);
}

TEST_CASE("box dimension on synthetic zero sets") {
  const std::vector<double> scales{5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3, 5e-4};
  // full interval: dimension 1
  ZeroSet full;
  full.dt = 1e-4;
  full.flags.assign(10000, 1);
  DimensionEstimate d1 = box_dimension(full, 0.0, 1.0, scales);
  CHECK(!d1.unreliable);
  CHECK(d1.slope == doctest::Approx(1.0).epsilon(0.02));

  // middle-thirds Cantor set to depth 9: dimension log 2 / log 3
  ZeroSet cantor;
  cantor.dt = 1e-5;
  cantor.flags.assign(100000, 0);
  for (long k = 0; k < 100000; ++k) {
    double x = (k + 0.5) * cantor.dt;
    bool in = true;
    for (int d = 0; d < 9; ++d) {
      x *= 3.0;
      const int digit = int(x);
      if (digit == 1) {
        in = false;
        break;
      }
      x -= digit;
    }
    cantor.flags[k] = in ? 1 : 0;
  }
  DimensionEstimate dc = box_dimension(cantor, 0.0, 1.0, scales);
  CHECK(!dc.unreliable);
  CHECK(dc.slope ==
        doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.08));

  // empty window: flagged unreliable
  ZeroSet none;
  none.dt = 1e-3;
  none.flags.assign(1000, 0);
  CHECK(box_dimension(none, 0.0, 1.0, scales).unreliable);
}

TEST_CASE("T0 constant bound grid is quadrature-stable") {
  Lemma23Report rep =
      lemma23_bound_check(0.1, {0.1, 0.2, 0.4}, {0.05, 0.1, 0.2});
  CHECK(rep.stable);
  CHECK(std::isfinite(rep.fitted));
  CHECK(rep.fitted > 0.0);
  CHECK(rep.fitted_refined == doctest::Approx(rep.fitted).epsilon(1e-6));
  REQUIRE(rep.rows.size() == 9);
  for (const Lemma23Row& r : rep.rows) {
    CHECK(r.ratio > 0.0);
    CHECK(std::isfinite(r.ratio));
  }
}
