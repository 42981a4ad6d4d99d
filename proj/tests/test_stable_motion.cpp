#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ssp/common.hpp"
#include "ssp/rng.hpp"
#include "ssp/stable_law.hpp"
#include "ssp/stable_motion.hpp"

using namespace ssp;

TEST_CASE("law gates and the alpha = 1 constant") {
  CHECK_THROWS_AS(StableLaw(0.0), GateError);
  CHECK_THROWS_AS(StableLaw(2.0), GateError);
  CHECK_THROWS_AS(StableLaw(-0.3), GateError);
  CHECK(levy_constant(1.0) ==
        doctest::Approx(1.0 / std::acos(-1.0)).epsilon(1e-14));
}

TEST_CASE("jump-kernel constant agrees with the independent symbol integral") {
  for (double alpha : {0.4, 0.5, 0.6, 1.0, 1.5}) {
    const StableLaw law(alpha);
    CHECK(law.c_alpha ==
          doctest::Approx(oracle::jump_constant(alpha)).epsilon(1e-6));
  }
  CHECK(StableLaw(0.5).c_alpha ==
        doctest::Approx(oracle::kJumpConstantHalf).epsilon(1e-12));
}

TEST_CASE("alpha = 1 increments are Cauchy distributed") {
  const StableLaw law(1.0);
  RngStream rng(17, 0);
  const int n = 60000;
  const double t = 0.7;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = sample_increment(law, t, rng);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = oracle::cauchy_cdf(t, xs[i]);
    ks = std::max(ks, std::abs(F - (i + 0.5) / n));
  }
  // K-S acceptance far beyond the 0.1% point 1.95/sqrt(n) ~ 0.008
  CHECK(ks < 0.012);
}

TEST_CASE("characteristic function matches exp(-t |xi|^alpha)") {
  for (double alpha : {0.5, 1.2, 1.8}) {
    const StableLaw law(alpha);
    RngStream rng(23, int(alpha * 10));
    const int n = 200000;
    const double t = 0.5;
    for (double xi : {0.7, 1.3}) {
      double re = 0.0;
      RngStream r2(23, int(alpha * 100) + int(xi * 10));
      for (int i = 0; i < n; ++i)
        re += std::cos(xi * sample_increment(law, t, r2));
      re /= n;
      const double target = std::exp(-t * std::pow(xi, alpha));
      CHECK(std::abs(re - target) < 5.0 / std::sqrt(double(n)));
    }
    (void)rng;
  }
}

TEST_CASE("increments scale like t^{1/alpha}") {
  const StableLaw law(0.5);
  RngStream a(29, 0), b(29, 0);
  // same stream: X_t and t^{1/alpha} X_1 use identical uniforms, so the
  // scaling identity holds path by path
  for (int i = 0; i < 1000; ++i) {
    const double dt = 0.01;
    const double x = sample_increment(law, dt, a);
    const double y = std::pow(dt, 1.0 / 0.5) * sample_standard(law, b);
    CHECK(x == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("exit jumps land outside the ball with the right side split") {
  const StableLaw law(0.7);
  const double R = 2.0;
  RngStream rng(31, 0);
  for (double x : {-1.5, 0.0, 1.2}) {
    int right = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
      const double y = sample_exit_jump(law, x, R, rng);
      REQUIRE(std::abs(y) >= R);
    }
    RngStream r2(31, 1);
    for (int i = 0; i < n; ++i)
      if (sample_exit_jump(law, x, R, r2) > 0.0) ++right;
    const double pr = exit_right_probability(0.7, x, R);
    CHECK(std::abs(double(right) / n - pr) <
          4.0 * std::sqrt(pr * (1.0 - pr) / n) + 1e-9);
  }
}

TEST_CASE("killed paths stop at the first exit and stay inside otherwise") {
  const StableLaw law(0.9);
  const double R = 1.0;
  RngStream rng(37, 0);
  int exits = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const KilledPath kp = sample_killed_path(law, 0.2, R, 0.5, 0.01, rng);
    REQUIRE(!kp.positions.empty());
    CHECK(kp.positions.front() == 0.2);
    for (double pos : kp.positions) CHECK(std::abs(pos) < R);
    if (kp.exited) {
      ++exits;
      CHECK(kp.exit_time > 0.0);
      CHECK(kp.exit_time <= 0.5 + 1e-12);
    }
  }
  CHECK(exits > 0);  // alpha-stable paths certainly leave B_1 by t = 0.5

  bool alive = true;
  RngStream r2(37, 1);
  const double end = killed_endpoint(law, 0.2, R, 0.5, 0.01, r2, alive);
  if (alive) CHECK(std::abs(end) < R);
}

TEST_CASE("running supremum tail statistic is finite and ordered") {
  const StableLaw law(0.5);
  const std::vector<double> rs{2.0, 4.0, 8.0};
  const std::vector<double> vals = sup_tail(law, rs, 4000, 0.01, 41);
  REQUIRE(vals.size() == rs.size());
  for (double v : vals) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  // r^alpha P(sup >= r) is bounded for stable tails: the scaled values stay
  // within a constant factor of each other
  const double lo = *std::min_element(vals.begin(), vals.end());
  const double hi = *std::max_element(vals.begin(), vals.end());
  CHECK(lo > 0.0);
  CHECK(hi / lo < 5.0);
}
