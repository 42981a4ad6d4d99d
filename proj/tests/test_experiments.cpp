#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssp/branching.hpp"
#include "ssp/common.hpp"
#include "ssp/experiments.hpp"
#include "ssp/stable_law.hpp"

using namespace ssp;

TEST_CASE("ring indicator: dead zone, plateau, linear transition") {
  const double y = 2.0, r = 0.8;
  CHECK(ring_indicator(y, y, r) == 0.0);
  CHECK(ring_indicator(y + 0.19, y, r) == 0.0);           // inside r/4
  CHECK(ring_indicator(y - 0.19, y, r) == 0.0);
  CHECK(ring_indicator(y + 0.41, y, r) == 1.0);           // beyond r/2
  CHECK(ring_indicator(y - 5.0, y, r) == 1.0);
  CHECK(ring_indicator(y + 0.3, y, r) ==
        doctest::Approx(0.5).epsilon(1e-12));              // midpoint
  // continuity at the knots
  CHECK(ring_indicator(y + 0.2, y, r) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ring_indicator(y + 0.4, y, r) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tau detector latches the first concentrated low-mass time") {
  TauDetector det(0.1, 0.5, 10.0);
  CHECK(!det.triggered());

  // concentrated blob at a lattice point but mass too large: no trigger
  ParticlePopulation big;
  big.mass_unit = 0.01;
  big.time = 1.0;
  for (int i = 0; i < 50; ++i) big.particles.push_back({0.0, label_V});
  CHECK(!det.check(big));

  // small mass but spread out: probe average exceeds epsilon^3
  ParticlePopulation spread;
  spread.mass_unit = 0.01;
  spread.time = 2.0;
  spread.particles = {{-4.0, label_V}, {4.0, label_V}};
  CHECK(!det.check(spread));

  // small concentrated mass: triggers and latches
  ParticlePopulation small;
  small.mass_unit = 0.01;
  small.time = 3.0;
  for (int i = 0; i < 5; ++i) small.particles.push_back({1.0, label_V});
  CHECK(det.check(small));
  CHECK(det.triggered());
  CHECK(det.tau_time() == 3.0);
  CHECK(std::abs(det.center_x() - 1.0) <= 0.125 + 1e-12);  // lattice pitch r/4
  CHECK(det.mu_mass() == doctest::Approx(0.05));
  // latched: later calls keep returning true without rewriting the record
  CHECK(det.check(big));
  CHECK(det.tau_time() == 3.0);
}

TEST_CASE("population tail centroid is translation-equivariant") {
  PopulationTail tail_a(3, 64), tail_b(3, 64);
  for (int step = 0; step < 4; ++step) {
    ParticlePopulation pa, pb;
    pa.mass_unit = pb.mass_unit = 0.1;
    pa.time = pb.time = step * 0.5;
    for (int i = 0; i <= step; ++i) {
      const double x = 0.3 * i - 0.2 * step;
      pa.particles.push_back({x, label_V});
      pb.particles.push_back({x + 7.5, label_V});
    }
    tail_a.observe(pa);
    tail_b.observe(pb);
  }
  const SupportEstimate ea = estimate_F(tail_a);
  const SupportEstimate eb = estimate_F(tail_b);
  CHECK(eb.f_hat == doctest::Approx(ea.f_hat + 7.5).epsilon(1e-12));
  CHECK(ea.n_snapshots == 3);

  // concentration sees all mass within a wide radius of the centroid
  CHECK(concentration_within(tail_a, ea.f_hat, 50.0) ==
        doctest::Approx(1.0).epsilon(1e-12));

  PopulationTail empty_tail;
  CHECK_THROWS_AS(estimate_F(empty_tail), ConfigError);
}

TEST_CASE("experiment parameter gates") {
  Theorem11Config c{StableLaw(0.5)};
  c.initial = {{0.0, 1.0}};
  c.n_replicas = 1;
  CHECK_NOTHROW(c.validate());
  Theorem11Config bad_alpha{StableLaw(0.7)};
  bad_alpha.initial = c.initial;
  CHECK_THROWS_AS(bad_alpha.validate(), GateError);
  Theorem11Config bad_eps = c;
  bad_eps.epsilon = 0.3;
  CHECK_THROWS_AS(bad_eps.validate(), GateError);
  Theorem11Config bad_R = c;
  bad_R.decomposition_radius = 2.0 * bad_R.inner_radius + 1.0;  // not strict
  CHECK_THROWS_AS(bad_R.validate(), GateError);

  Theorem12Config t{StableLaw(0.5)};
  t.initial = {{0.0, 1.0}};
  t.n_replicas = 1;
  CHECK_NOTHROW(t.validate());
  Theorem12Config bad_lat = t;
  bad_lat.lattice_half_width = 0.1;  // smaller than the probe scale
  CHECK_THROWS_AS(bad_lat.validate(), GateError);
  Theorem12Config bad_win = t;
  bad_win.window_start_points = 1;
  CHECK_THROWS_AS(bad_win.validate(), GateError);
}

TEST_CASE("detected-set dimension mirrors box counting on synthetic times") {
  std::vector<double> times;
  for (int i = 0; i < 20000; ++i) times.push_back(0.04 + 0.16 * i / 19999.0);
  const std::vector<double> scales{2e-2, 1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4,
                                   1e-4};
  DimensionEstimate est = dimension_of_detected_set(times, 0.04, 0.2, scales);
  CHECK(!est.unreliable);
  CHECK(est.slope == doctest::Approx(1.0).epsilon(0.05));

  DimensionEstimate sparse =
      dimension_of_detected_set({0.1}, 0.04, 0.2, scales);
  CHECK(sparse.unreliable);
}

TEST_CASE("small theorem pipelines run end to end deterministically") {
  Theorem11Config c{StableLaw(0.5)};
  c.epsilon = 0.2;
  c.inner_radius = 1.0;
  c.decomposition_radius = 4.0;
  c.initial = {{0.0, 1.0}};
  c.particles_per_unit = 100;
  c.dt = 2e-3;
  c.n_replicas = 20;
  c.seed = 91;
  Theorem11Summary s1 = run_theorem11(c);
  Theorem11Summary s2 = run_theorem11(c);
  REQUIRE(s1.n_replicas == 20);
  CHECK(s1.gate_freq == s2.gate_freq);
  CHECK(s1.q == s2.q);
  CHECK(s1.pooled_detect_times.size() == s2.pooled_detect_times.size());
  CHECK(s1.gate_freq >= 0.0);
  CHECK(s1.gate_freq <= 1.0);
  for (const Theorem11Replica& r : s1.replicas)
    if (r.detected) CHECK(r.n_detect_times > 0);

  Theorem12Config t{StableLaw(0.5)};
  t.initial = {{0.0, 1.0}};
  t.particles_per_unit = 100;
  t.dt = 4e-3;
  t.t_max = 4.0;
  t.n_replicas = 10;
  t.seed = 17;
  t.epsilons = {0.2, 0.1};
  Theorem12Result r1 = run_theorem12(t);
  Theorem12Result r2 = run_theorem12(t);
  REQUIRE(r1.per_epsilon.size() == 2);
  CHECK(r1.n_phase1_unresolved == r2.n_phase1_unresolved);
  for (std::size_t i = 0; i < r1.per_epsilon.size(); ++i) {
    CHECK(r1.per_epsilon[i].gate_freq == r2.per_epsilon[i].gate_freq);
    CHECK(r1.per_epsilon[i].q == r2.per_epsilon[i].q);
    CHECK(r1.per_epsilon[i].n_triggered <= t.n_replicas);
  }
}
