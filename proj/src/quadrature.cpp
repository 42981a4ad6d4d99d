#include "ssp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ssp {

static GaussRule make_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, then Newton on P_n
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 128) throw std::invalid_argument("gauss order");
  static std::map<int, GaussRule> cache;
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_rule(order)).first;
  return it->second;
}

double integrate_panel(const Fn1& f, double a, double b, int order) {
  const GaussRule& r = gauss_legendre(order);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i)
    s += r.weights[i] * f(c + h * r.nodes[i]);
  return s * h;
}

double integrate_panels(const Fn1& f, const std::vector<double>& breaks,
                        int order) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i)
    s += integrate_panel(f, breaks[i], breaks[i + 1], order);
  return s;
}

std::vector<double> graded_breaks(double a, double b, bool grade_left,
                                  bool grade_right, int levels, double ratio,
                                  int interior) {
  if (!(b > a)) throw std::invalid_argument("graded_breaks: empty interval");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("graded_breaks: ratio in (0,1)");
  if (levels < 1) throw std::invalid_argument("graded_breaks: levels");
  const double span = b - a;
  std::vector<double> breaks{a, b};
  double mid_lo = a, mid_hi = b;
  // stop grading once the offset is no longer resolvable in double precision
  // (deeper levels would duplicate the endpoint or leave sub-ulp slivers)
  const double d_min =
      16.0 * std::numeric_limits<double>::epsilon() *
      std::max({span, std::abs(a), std::abs(b)});
  if (grade_left) {
    double d = 0.5 * span;
    mid_lo = a + d;
    for (int k = 0; k < levels && d > d_min; ++k) {
      breaks.push_back(a + d);
      d *= ratio;
    }
  }
  if (grade_right) {
    double d = grade_left ? 0.25 * span : 0.5 * span;
    mid_hi = b - d;
    for (int k = 0; k < levels && d > d_min; ++k) {
      breaks.push_back(b - d);
      d *= ratio;
    }
  }
  for (int i = 1; i < interior; ++i)
    breaks.push_back(mid_lo + (mid_hi - mid_lo) * i / interior);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

std::vector<double> merge_breaks(std::vector<double> breaks,
                                 const std::vector<double>& extra) {
  const double lo = breaks.front(), hi = breaks.back();
  for (double x : extra)
    if (x > lo && x < hi) breaks.push_back(x);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

namespace {

double adaptive_panel(const Fn1& f, double a, double b, double i16,
                      double tol_abs, double tol_rel, int depth) {
  const double i8 = integrate_panel(f, a, b, 8);
  if (depth <= 0 || std::abs(i16 - i8) <= tol_abs + tol_rel * std::abs(i16))
    return i16;
  const double m = 0.5 * (a + b);
  const double l = integrate_panel(f, a, m, 16);
  const double r = integrate_panel(f, m, b, 16);
  return adaptive_panel(f, a, m, l, 0.5 * tol_abs, tol_rel, depth - 1) +
         adaptive_panel(f, m, b, r, 0.5 * tol_abs, tol_rel, depth - 1);
}

}  // namespace

double integrate_adaptive(const Fn1& f, const std::vector<double>& breaks,
                          double tol_abs, double tol_rel, int max_depth) {
  if (breaks.size() < 2)
    throw std::invalid_argument("integrate_adaptive: need >= 2 breakpoints");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    sum += adaptive_panel(f, a, b, integrate_panel(f, a, b, 16), tol_abs,
                          tol_rel, max_depth);
  }
  return sum;
}

}  // namespace ssp
