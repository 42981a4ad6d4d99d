#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssp/quadrature.hpp"

using namespace ssp;

TEST_CASE("gauss rules integrate polynomials of degree 2n-1 exactly") {
  for (int order : {2, 4, 8, 16, 24}) {
    const GaussRule& rule = gauss_legendre(order);
    REQUIRE(int(rule.nodes.size()) == order);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // monomial x^(2n-2): value 2/(2n-1)
    const int m = 2 * order - 2;
    double acc = 0.0;
    for (int i = 0; i < order; ++i)
      acc += rule.weights[i] * std::pow(rule.nodes[i], m);
    CHECK(acc == doctest::Approx(2.0 / (m + 1)).epsilon(1e-12));
  }
}

TEST_CASE("panel quadrature on smooth integrands") {
  auto f = [](double x) { return std::exp(x); };
  CHECK(integrate_panel(f, 0.0, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  const std::vector<double> breaks{0.0, 0.3, 0.7, 1.0};
  CHECK(integrate_panels(f, breaks) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("graded breaks cover the interval and stay ordered") {
  for (int levels : {4, 12, 40, 400}) {
    const std::vector<double> b =
        graded_breaks(0.0, 1.0, true, true, levels, 0.5);
    REQUIRE(b.size() >= 2);
    CHECK(b.front() == 0.0);
    CHECK(b.back() == 1.0);
    for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i] > b[i - 1]);
  }
  // one-sided grading leaves the other end to the interior mesh
  const std::vector<double> left =
      graded_breaks(-2.0, 3.0, true, false, 6, 0.25, 4);
  CHECK(left.front() == -2.0);
  CHECK(left.back() == 3.0);
  for (std::size_t i = 1; i < left.size(); ++i) CHECK(left[i] > left[i - 1]);
}

TEST_CASE("merge breaks inserts interior points only") {
  std::vector<double> base{0.0, 1.0, 2.0};
  const std::vector<double> merged =
      merge_breaks(base, {-5.0, 0.5, 0.5, 1.5, 7.0});
  REQUIRE(merged.size() == 5);
  CHECK(merged[0] == 0.0);
  CHECK(merged[1] == 0.5);
  CHECK(merged[2] == 1.0);
  CHECK(merged[3] == 1.5);
  CHECK(merged[4] == 2.0);
}

TEST_CASE("adaptive quadrature on singular and oscillatory integrands") {
  // endpoint singularity: int_0^1 x^{-1/2} dx = 2, graded mesh toward 0
  auto sqrt_sing = [](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; };
  const std::vector<double> graded =
      graded_breaks(0.0, 1.0, true, false, 44, 0.5);
  CHECK(integrate_adaptive(sqrt_sing, graded, 1e-12, 1e-12) ==
        doctest::Approx(2.0).epsilon(1e-8));

  // oscillatory: int_0^{20 pi} cos = 0 exactly
  const double Z = 20.0 * std::acos(-1.0);
  auto osc = [](double x) { return std::cos(x); };
  CHECK(std::abs(integrate_adaptive(osc, {0.0, Z}, 1e-12, 1e-12)) < 1e-9);

  // smooth closed form: int_{-1}^{4} 1/(1+x^2) = atan(4) + atan(1)
  auto runge = [](double x) { return 1.0 / (1.0 + x * x); };
  CHECK(integrate_adaptive(runge, {-1.0, 0.0, 4.0}) ==
        doctest::Approx(std::atan(4.0) + std::atan(1.0)).epsilon(1e-12));
}
