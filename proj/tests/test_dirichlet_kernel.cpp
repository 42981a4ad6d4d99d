#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ssp/common.hpp"
#include "ssp/dirichlet_kernel.hpp"
#include "ssp/stable_law.hpp"

using namespace ssp;

TEST_CASE("boundary flux closed form vs library and oracle quadrature") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const StableLaw law(alpha);
    const double R = 1.0;
    for (double x : {-0.6, 0.0, 0.4, 0.8}) {
      const double closed = boundary_flux(law, R, x);
      const double quad = boundary_flux_quadrature(law, R, x);
      CHECK(quad == doctest::Approx(closed).epsilon(1e-6));
      const double ref =
          oracle::flux_one_side(law.c_alpha, alpha, R, x) +
          oracle::flux_one_side(law.c_alpha, alpha, R, -x);
      CHECK(closed == doctest::Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("flux envelope f_R <= C (R-|x|)^{-alpha} with C = 2 c/alpha") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const StableLaw law(alpha);
    const double C = flux_bound_constant(law);
    CHECK(C == doctest::Approx(2.0 * law.c_alpha / alpha).epsilon(1e-14));
    for (double R : {1.0, 3.0}) {
      double worst = 0.0;
      for (int i = 0; i < 199; ++i) {
        const double x = -0.995 * R + (1.99 * R) * i / 198.0;
        const double ratio = boundary_flux(law, R, x) /
                             (C * std::pow(R - std::abs(x), -alpha));
        worst = std::max(worst, ratio);
      }
      CHECK(worst <= 1.0 + 1e-12);
      CHECK(worst > 0.5);  // the bound is tight at the boundary
    }
  }
}

TEST_CASE("fractional Laplacian reproduces the symbol on cosines") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const StableLaw law(alpha);
    for (double xi : {0.5, 1.0, 2.0}) {
      for (double x : {0.0, 0.4}) {
        auto f = [xi](double y) { return std::cos(xi * y); };
        const double got = apply_frac_laplacian(f, x, law);
        const double want = -std::pow(xi, alpha) * std::cos(xi * x);
        CHECK(got == doctest::Approx(want).epsilon(1e-3));
      }
    }
  }
}

TEST_CASE("kernel bound: domain gates, positivity, symmetry in (x,y)") {
  const StableLaw law(0.5);
  const double R = 2.0;
  CHECK_THROWS_AS(kernel_bound(0.1, 2.5, 0.0, R, law), std::invalid_argument);
  CHECK_THROWS_AS(kernel_bound(-0.1, 0.0, 0.0, R, law), std::invalid_argument);
  for (double t : {0.05, 0.3}) {
    for (double x : {-1.5, 0.0, 1.0}) {
      for (double y : {-1.0, 0.5, 1.9}) {
        const double k = kernel_bound(t, x, y, R, law);
        CHECK(k > 0.0);
        CHECK(std::isfinite(k));
        CHECK(k == doctest::Approx(kernel_bound(t, y, x, R, law))
                       .epsilon(1e-12));
      }
    }
  }
  // diagonal short-time blowup: kappa(t, x, x) ~ t^{-1/alpha}
  CHECK(kernel_bound(1e-4, 0.0, 0.0, R, law) >
        kernel_bound(1e-2, 0.0, 0.0, R, law));
}

TEST_CASE("kernel quadrature plan integrates the same as the direct routine") {
  const StableLaw law(0.6);
  const double R = 2.0, s = 0.15, y = 0.8;
  auto w = [](double x) { return std::cos(0.7 * x) + 1.5; };
  const double direct = kernel_bound_integral(law, R, s, y, w, 18, 0.5);
  std::vector<double> nodes, weights;
  kernel_quadrature(law, R, s, y, 18, 0.5, 16, 16, nodes, weights);
  REQUIRE(nodes.size() == weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CHECK(std::abs(nodes[i]) < R);
    acc += weights[i] * w(nodes[i]);
  }
  CHECK(acc == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("admissible weighted kernel bound is refinement-stable") {
  const StableLaw law(0.5);
  const double gamma = 0.5 * (1.0 / 0.5 + 0.5);  // half the admissible limit
  LemmaCheck chk =
      check_lemma34(law, 2.0, gamma, {0.1, 0.2}, {0.0, 1.0, 1.9}, 3);
  REQUIRE(chk.trace.size() == 3);
  CHECK(!chk.diverging);
  for (double v : chk.trace) CHECK(std::isfinite(v));
  CHECK(std::abs(chk.trace.back() / chk.trace.front() - 1.0) < 0.02);
  CHECK(chk.rows.size() == 3);
  CHECK(chk.rows.front().lemma_id == "3.4");
}

TEST_CASE("super-critical weight exponent makes the bound integral blow up") {
  const StableLaw law(0.5);
  const double gamma = 1.0 / 0.5 + 0.5 + 0.1;  // past the admissible limit
  LemmaCheck chk = check_lemma34(law, 2.0, gamma, {0.1}, {1.9}, 3);
  CHECK(chk.trace.back() > 1.2 * chk.trace.front());
}

TEST_CASE("gate rejections for the lemma checks") {
  const StableLaw law(0.5);
  CHECK_THROWS_AS(check_lemma34(law, 2.0, -0.1, {0.1}, {0.0}, 2), GateError);
  // 3.6 enforces gamma < 1/alpha - 1/2 when the gate flag is on
  CHECK_THROWS_AS(
      check_lemma36(law, 2.0, 2.0, 0.1, {0.1}, {0.0}, 2, true), GateError);
  CHECK_THROWS_AS(
      check_lemma36(law, 2.0, 0.1, 5.0, {0.1}, {0.0}, 2, true), GateError);
}

TEST_CASE("time-shift bound (3.6) is stable for admissible exponents") {
  const StableLaw law(0.5);
  const double g36 = 0.5 * (1.0 / 0.5 - 0.5);
  const double rho = 0.5 * std::min(1.0, 1.0 / 0.5 - g36);
  LemmaCheck chk = check_lemma36(law, 2.0, g36, rho, {0.1, 0.3}, {0.0, 1.5}, 2);
  CHECK(!chk.diverging);
  for (double v : chk.trace) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
  CHECK(chk.rows.front().lemma_id == "3.6");
}

TEST_CASE("survival-difference bound (3.5) reports finite fitted constants") {
  const StableLaw law(0.5);
  Lemma35Result res =
      check_lemma35(law, 2.0, {0.1, 0.2}, {0.0, 0.8, 1.4}, 4000, 50, 99);
  REQUIRE(res.fitted_constant.size() == 2);
  for (double c : res.fitted_constant) {
    CHECK(std::isfinite(c));
    CHECK(c > 0.0);
    CHECK(c < 10.0);
  }
  CHECK(res.rows.front().lemma_id == "3.5");
}

TEST_CASE("killed density estimate integrates to the survival probability") {
  const StableLaw law(0.8);
  KilledDensityEstimate est =
      estimate_p_R(law, 1.5, 0.3, 0.0, 20000, 5e-3, 24, 12345);
  REQUIRE(!est.density.empty());
  double mass = 0.0;
  for (double d : est.density) mass += d * est.bin_width;
  CHECK(mass == doctest::Approx(est.survival).epsilon(1e-9));
  CHECK(est.survival > 0.1);
  CHECK(est.survival < 1.0);
}
