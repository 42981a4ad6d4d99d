#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ssp/common.hpp"
#include "ssp/moments.hpp"
#include "ssp/stable_law.hpp"

using namespace ssp;

TEST_CASE("stable density: Cauchy closed form at alpha = 1") {
  StableDensity p(1.0);
  for (double x : {0.0, 0.3, 1.0, 4.0, 25.0}) {
    CHECK(p.p1(x) == doctest::Approx(oracle::cauchy_density(1.0, x))
                         .epsilon(1e-8));
    CHECK(p(0.4, x) == doctest::Approx(oracle::cauchy_density(0.4, x))
                           .epsilon(1e-8));
  }
}

TEST_CASE("stable density: symmetry, positivity, normalization with tail") {
  for (double alpha : {0.5, 0.8, 1.5}) {
    StableDensity p(alpha);
    for (double x : {0.1, 0.7, 2.0, 9.0})
      CHECK(p.p1(x) == doctest::Approx(p.p1(-x)).epsilon(1e-12));
    const double L = 60.0;
    auto f = [&](double x) { return p.p1(x); };
    const double body = oracle::simpson(f, -L, L, 60000);
    // P(|X| > L) ~ 2 (c_alpha / alpha) L^{-alpha} from the jump-kernel tail
    const double tail =
        2.0 * levy_constant(alpha) / alpha * std::pow(L, -alpha);
    CHECK(body + tail == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(body < 1.0 + 1e-9);
  }
}

TEST_CASE("full-space oracle conserves mass and reproduces convolutions") {
  const StableLaw law(1.0);
  FullSpaceOracle oracle_fs(law, 12.0, 97);
  auto one = [](double) { return 1.0; };
  const std::vector<double> u = oracle_fs.apply_fn(one, 0.35);
  for (double v : u) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));

  // P_t phi at a point against an independent Cauchy-kernel convolution
  auto phi = [](double x) { return std::exp(-x * x); };
  const double t = 0.5, x0 = 0.7;
  const double lib = oracle_fs.point_value(phi, t, x0);
  auto conv = [&](double y) {
    return oracle::cauchy_density(t, x0 - y) * phi(y);
  };
  const double ref = oracle::simpson(conv, -60.0, 60.0, 40000);
  CHECK(lib == doctest::Approx(ref).epsilon(1e-6));

  // t = 0 returns the input
  const std::vector<double> g0 = oracle_fs.apply_fn(phi, 0.0);
  const std::vector<double>& grid = oracle_fs.grid();
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(g0[i] == doctest::Approx(phi(grid[i])).epsilon(1e-12));
}

TEST_CASE("moment recursion with phi == 1 hits the closed forms") {
  const StableLaw law(1.0);
  FullSpaceOracle oracle_fs(law, 10.0, 61);
  auto one = [](double) { return 1.0; };
  const double s = 0.5;
  VnTable tab = compute_vn(oracle_fs, one, s, 4, 192);
  // v_n is spatially constant for phi == 1: v2 = s, v3 = 3 s^2/2, v4 = 3 s^3
  for (double v : tab.final(1)) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  for (double v : tab.final(2)) CHECK(v == doctest::Approx(s).epsilon(1e-7));
  for (double v : tab.final(3))
    CHECK(v == doctest::Approx(1.5 * s * s).epsilon(1e-6));
  for (double v : tab.final(4))
    CHECK(v == doctest::Approx(3.0 * s * s * s).epsilon(2e-5));

  // assembled raw moments against the Ito expansions, mass 2 initial measure
  const std::vector<Atom> mu{{0.0, 1.5}, {1.0, 0.5}};
  const std::vector<double> m =
      raw_moments_from_vn(tab, mu, oracle_fs.grid(), 4);
  for (int n = 1; n <= 4; ++n)
    CHECK(m[n - 1] ==
          doctest::Approx(oracle::ito_moment(2.0, s, n)).epsilon(3e-5));
}

TEST_CASE("pairing a measure against grid functions interpolates linearly") {
  const StableLaw law(1.0);
  FullSpaceOracle oracle_fs(law, 5.0, 11);  // grid pitch 1.0
  const std::vector<double>& grid = oracle_fs.grid();
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g[i] = 2.0 * grid[i] + 3.0;
  // a linear function is reproduced exactly by linear interpolation
  const std::vector<Atom> mu{{-1.25, 1.0}, {0.5, 2.0}};
  const double want = (2.0 * -1.25 + 3.0) * 1.0 + (2.0 * 0.5 + 3.0) * 2.0;
  CHECK(pair_measure(mu, grid, g) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("kappa surrogate oracle is positive and matrix-consistent") {
  const StableLaw law(0.5);
  KappaKilledOracle ko(law, 2.0, 14, 0.6, 12);
  auto phi = [](double x) { return 1.0 + 0.2 * std::sin(x); };
  const double t = 0.2;
  const std::vector<double> direct = ko.apply_fn(phi, t);
  const std::vector<double>& grid = ko.grid();
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g[i] = phi(grid[i]);
  const std::vector<double> viag = ko.apply(g, t);
  REQUIRE(direct.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(direct[i] > 0.0);
    CHECK(std::isfinite(direct[i]));
    // grid-sampled application agrees with the callable one up to the
    // interpolation error of a smooth integrand
    CHECK(viag[i] == doctest::Approx(direct[i]).epsilon(5e-3));
  }
}

TEST_CASE("path-killed oracle is a Monte Carlo sub-Markov contraction") {
  const StableLaw law(0.8);
  PathKilledOracle po(law, 1.5, 4000, 40, 2024, 21);
  auto one = [](double) { return 1.0; };
  const std::vector<double> early = po.apply_fn(one, 0.1);
  const std::vector<double> late = po.apply_fn(one, 0.4);
  for (std::size_t i = 0; i < early.size(); ++i) {
    CHECK(early[i] <= 1.0 + 1e-12);
    CHECK(early[i] >= 0.0);
    // longer horizons kill more mass (same driving paths)
    CHECK(late[i] <= early[i] + 1e-12);
  }
}

TEST_CASE("vn envelope report: gates and stability on a small grid") {
  CHECK_THROWS_AS(
      check_vn_envelopes(StableLaw(0.7), 2.0, {0.05, 0.1}, 0.1, 24),
      GateError);
  CHECK_THROWS_AS(
      check_vn_envelopes(StableLaw(0.5), 2.0, {0.05, 0.1}, 0.9, 24),
      GateError);
  VnEnvelopeReport rep =
      check_vn_envelopes(StableLaw(0.5), 2.0, {0.05, 0.1}, 0.25, 24);
  REQUIRE(rep.fitted.size() == 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(std::isfinite(rep.fitted[n]));
    CHECK(rep.fitted[n] > 0.0);
    CHECK(rep.fitted_refined[n] ==
          doctest::Approx(rep.fitted[n]).epsilon(0.15));
  }
}
