#include "ssp/dirichlet_kernel.hpp"

#include "ssp/common.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ssp/quadrature.hpp"
#include "ssp/stable_motion.hpp"

namespace ssp {

double boundary_flux(const StableLaw& law, double R, double x) {
  if (!(std::abs(x) < R)) throw std::invalid_argument("boundary_flux: |x| < R");
  const double a = law.alpha;
  return law.c_alpha / a * (std::pow(R - x, -a) + std::pow(R + x, -a));
}

double boundary_flux_quadrature(const StableLaw& law, double R, double x,
                                int order, int panels) {
  if (!(std::abs(x) < R))
    throw std::invalid_argument("boundary_flux_quadrature: |x| < R");
  const double a = law.alpha;
  // int_R^inf c |y-x|^{-1-a} dy with u = 1/(y-x):
  //   int_0^{1/(R-x)} c u^{a-1} du   (and mirrored for the left side)
  auto side = [&](double dist) {
    const double top = 1.0 / dist;
    // u^{a-1} is singular at 0: geometric grading toward 0
    std::vector<double> breaks = graded_breaks(0.0, top, true, false, panels, 0.5, 4);
    auto f = [&](double u) { return std::pow(u, a - 1.0); };
    return law.c_alpha * integrate_panels(f, breaks, order);
  };
  return side(R - x) + side(R + x);
}

double flux_bound_constant(const StableLaw& law) {
  return 2.0 * law.c_alpha / law.alpha;
}

double apply_frac_laplacian(const std::function<double(double)>& f, double x,
                            const StableLaw& law, double eps, double zmax) {
  if (!(eps > 0.0 && zmax > eps))
    throw std::invalid_argument("apply_frac_laplacian: need 0 < eps < zmax");
  const double a = law.alpha;
  const double fx = f(x);
  // outer jump integral on eps <= |z| <= zmax, panels per half-octave
  std::vector<double> breaks{eps};
  while (breaks.back() < zmax) breaks.push_back(breaks.back() * M_SQRT2);
  breaks.back() = zmax;
  auto g = [&](double z) {
    return (f(x + z) + f(x - z) - 2.0 * fx) * std::pow(z, -1.0 - a);
  };
  const double outer = integrate_adaptive(g, breaks, 1e-11, 1e-9);
  // Taylor compensation of the removed |z| < eps ball
  const double h = 1e-4;
  const double fpp = (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
  const double comp = fpp * std::pow(eps, 2.0 - a) / (2.0 - a);
  // Compensation of the truncated z > zmax tail: the -2 f(x) part integrates
  // in closed form; the f(x +- z) part is negligible for decaying or
  // oscillating test functions.
  const double tail = -2.0 * fx * std::pow(zmax, -a) / a;
  return law.c_alpha * (outer + comp + tail);
}

double kernel_bound(double t, double x, double y, double R,
                    const StableLaw& law) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel_bound: t > 0");
  if (!(std::abs(x) < R && std::abs(y) < R))
    throw std::invalid_argument("kernel_bound: points must lie in B_R");
  const double a = law.alpha;
  const double st = std::sqrt(t);
  const double bx = std::min(1.0, std::pow(R - std::abs(x), 0.5 * a) / st);
  const double by = std::min(1.0, std::pow(R - std::abs(y), 0.5 * a) / st);
  const double d = std::abs(y - x);
  const double peak = std::pow(t, -1.0 / a);
  const double core =
      (d == 0.0) ? peak : std::min(peak, t / std::pow(d, 1.0 + a));
  return bx * by * core;
}

KilledDensityEstimate estimate_p_R(const StableLaw& law, double R, double t,
                                   double x, int n_paths, double dt,
                                   int n_bins, std::uint64_t seed) {
  if (!(std::abs(x) < R)) throw std::invalid_argument("estimate_p_R: |x| < R");
  if (n_paths <= 0 || n_bins <= 0)
    throw std::invalid_argument("estimate_p_R: positive sizes");
  KilledDensityEstimate est;
  est.bin_width = 2.0 * R / n_bins;
  est.counts.assign(n_bins, 0);
  long alive_count = 0;
  for (int p = 0; p < n_paths; ++p) {
    RngStream rng(seed, static_cast<std::uint64_t>(p));
    bool alive = false;
    const double yend = killed_endpoint(law, x, R, t, dt, rng, alive);
    if (!alive) continue;
    ++alive_count;
    int b = static_cast<int>((yend + R) / est.bin_width);
    b = std::clamp(b, 0, n_bins - 1);
    ++est.counts[b];
  }
  est.survival = static_cast<double>(alive_count) / n_paths;
  est.bin_centers.resize(n_bins);
  est.density.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    est.bin_centers[b] = -R + (b + 0.5) * est.bin_width;
    est.density[b] =
        static_cast<double>(est.counts[b]) / n_paths / est.bin_width;
  }
  return est;
}

// ---- lemma checks -------------------------------------------------------

void kernel_quadrature(const StableLaw& law, double R, double s, double y,
                       int grade_levels, double grade_ratio, int order,
                       int interior, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  std::vector<double> breaks =
      graded_breaks(-R, R, true, true, grade_levels, grade_ratio, interior);
  const double s1a = std::pow(s, 1.0 / law.alpha);
  breaks = merge_breaks(std::move(breaks),
                        {y - s1a, y, y + s1a, -(R - s1a), R - s1a});
  const GaussRule& rule = gauss_legendre(order);
  nodes.clear();
  weights.clear();
  nodes.reserve((breaks.size() - 1) * rule.nodes.size());
  weights.reserve(nodes.capacity());
  const double h_min =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, R);
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double c = 0.5 * (breaks[i] + breaks[i + 1]);
    const double h = 0.5 * (breaks[i + 1] - breaks[i]);
    if (h <= h_min) continue;  // sub-ulp sliver: nodes would round onto +-R
    for (size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = c + h * rule.nodes[q];
      if (!(std::abs(x) < R)) continue;
      nodes.push_back(x);
      weights.push_back(h * rule.weights[q] * kernel_bound(s, x, y, R, law));
    }
  }
}

double kernel_bound_integral(const StableLaw& law, double R, double s,
                             double y, const std::function<double(double)>& w,
                             int grade_levels, double grade_ratio, int order,
                             int interior) {
  std::vector<double> nodes, weights;
  kernel_quadrature(law, R, s, y, grade_levels, grade_ratio, order, interior,
                    nodes, weights);
  double acc = 0.0;
  for (size_t p = 0; p < nodes.size(); ++p) acc += weights[p] * w(nodes[p]);
  return acc;
}

LemmaCheck check_lemma34(const StableLaw& law, double R, double gamma,
                         const std::vector<double>& s_grid,
                         const std::vector<double>& y_grid, int levels) {
  if (!(gamma >= 0.0))
    throw GateError("check_lemma34: gamma >= 0");
  LemmaCheck out;
  const double a = law.alpha;
  for (int lev = 0; lev < levels; ++lev) {
    // deepen the boundary grading by 8 halvings per level; the innermost
    // panel width stays resolvable in double precision at every level
    const double ratio = 0.5;
    const int glev = 12 + 8 * lev;
    double sup = 0.0;
    for (double s : s_grid) {
      for (double y : y_grid) {
        auto w = [&](double x) {
          return std::pow(R - std::abs(x), -gamma * a);
        };
        const double I = kernel_bound_integral(law, R, s, y, w, glev, ratio);
        const double envelope =
            std::pow(R - std::abs(y) + std::pow(s, 1.0 / a), -gamma * a);
        sup = std::max(sup, I / envelope);
      }
    }
    out.trace.push_back(sup);
    out.rows.push_back({"3.4", a, R, gamma, 0.0, lev, sup});
  }
  out.diverging = true;
  for (size_t i = 1; i < out.trace.size(); ++i)
    if (out.trace[i] < 1.25 * out.trace[i - 1]) out.diverging = false;
  return out;
}

Lemma35Result check_lemma35(const StableLaw& law, double R,
                            const std::vector<double>& s_values,
                            const std::vector<double>& x_grid, int n_paths,
                            int steps_per_s, std::uint64_t seed) {
  Lemma35Result out;
  const double a = law.alpha;
  std::uint64_t stream = 0;
  for (double s : s_values) {
    const double dt = s / steps_per_s;
    double fitted = 0.0, worst_ratio = 0.0;
    for (double x : x_grid) {
      const double fx = boundary_flux(law, R, x);
      double sum = 0.0, sumsq = 0.0;
      for (int p = 0; p < n_paths; ++p) {
        RngStream rng(seed, stream + p);
        bool alive = false;
        const double yend = killed_endpoint(law, x, R, s, dt, rng, alive);
        const double v = (alive ? boundary_flux(law, R, yend) : 0.0) - fx;
        sum += v;
        sumsq += v * v;
      }
      stream += n_paths;
      const double mean = sum / n_paths;
      const double var =
          std::max(0.0, sumsq / n_paths - mean * mean) / (n_paths - 1);
      const double se = std::sqrt(var);
      const double envelope = std::min(std::pow(R - std::abs(x), -a),
                                       s * std::pow(R - std::abs(x), -2.0 * a));
      const double ratio = std::abs(mean) / envelope;
      if (ratio > fitted) {
        fitted = ratio;
        worst_ratio = (std::abs(mean) > 0) ? 3.0 * se / std::abs(mean) : 1e9;
      }
    }
    out.s_values.push_back(s);
    out.fitted_constant.push_back(fitted);
    out.worst_stderr_ratio.push_back(worst_ratio);
    out.rows.push_back({"3.5", a, R, 0.0, 0.0,
                        static_cast<int>(out.s_values.size()) - 1, fitted});
  }
  for (double r : out.worst_stderr_ratio)
    if (r > 0.5) out.noisy = true;
  return out;
}

LemmaCheck check_lemma36(const StableLaw& law, double R, double gamma,
                         double rho, const std::vector<double>& t_grid,
                         const std::vector<double>& y_grid, int levels,
                         bool enforce_gate) {
  const double a = law.alpha;
  if (enforce_gate) {
    if (!(gamma >= 0.0 && gamma < 1.0 / a - 0.5))
      throw GateError("check_lemma36: need 0 <= gamma < 1/alpha - 1/2");
    if (!(rho >= 0.0 && rho <= std::min(1.0, 1.0 / a - gamma)))
      throw GateError(
          "check_lemma36: need 0 <= rho <= min(1, 1/alpha - gamma)");
  }
  LemmaCheck out;
  for (int lev = 0; lev < levels; ++lev) {
    const double ratio = 0.5;
    const int glev = 12 + 6 * lev;
    const int upanels = 24 + 8 * lev;
    double sup = 0.0;
    for (double t : t_grid) {
      for (double y : y_grid) {
        auto inner = [&](double u) {
          auto w = [&](double x) {
            return std::pow(R - std::abs(x) + std::pow(u, 1.0 / a),
                            -(2.0 + gamma) * a);
          };
          return kernel_bound_integral(law, R, t - u, y, w, glev, ratio, 8, 8);
        };
        std::vector<double> ubreaks =
            graded_breaks(0.0, t, true, true, upanels, 0.5, 6);
        const double I = integrate_panels(inner, ubreaks, 8);
        const double envelope =
            std::pow(t, rho) * std::pow(R - std::abs(y) + std::pow(t, 1.0 / a),
                                        -(1.0 + gamma + rho) * a);
        sup = std::max(sup, I / envelope);
      }
    }
    out.trace.push_back(sup);
    out.rows.push_back({"3.6", a, R, gamma, rho, lev, sup});
  }
  out.diverging = true;
  for (size_t i = 1; i < out.trace.size(); ++i)
    if (out.trace[i] < 1.25 * out.trace[i - 1]) out.diverging = false;
  return out;
}

}  // namespace ssp
