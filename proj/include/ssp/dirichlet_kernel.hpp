#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssp/rng.hpp"
#include "ssp/stable_law.hpp"

namespace ssp {

// Expected boundary-displacement flux out of B_R = (-R,R):
//   f_R(x) = (c_alpha/alpha) [ (R-x)^{-alpha} + (R+x)^{-alpha} ]
double boundary_flux(const StableLaw& law, double R, double x);

// same quantity by direct quadrature of the jump-kernel integral over B_R^c
// (substitution u = 1/|y-x| turns each side into a finite-interval integral)
double boundary_flux_quadrature(const StableLaw& law, double R, double x,
                                int order = 24, int panels = 64);

// constant in the envelope f_R(x) <= C (R-|x|)^{-alpha}
double flux_bound_constant(const StableLaw& law);

// Principal-value fractional Laplacian at x:
//   c_alpha PV int (f(x+z)-f(x)) |z|^{-1-alpha} dz,
// small-|z| part below `eps` replaced by the second-order Taylor
// compensation f''(x) eps^{2-alpha}/(2-alpha); jump integral truncated at
// |z| = zmax with log-graded panels.
double apply_frac_laplacian(const std::function<double(double)>& f, double x,
                            const StableLaw& law, double eps = 1e-4,
                            double zmax = 1e4);

// Comparability envelope for the killed transition density (diagonal uses
// the t^{-1/alpha} branch).  Requires 0 < t, |x| < R, |y| < R.
double kernel_bound(double t, double x, double y, double R,
                    const StableLaw& law);

// Quadrature plan for int_{B_R} kappa(s, y, x) w(x) dx: nodes x_p and
// weights q_p with the kappa factor folded in, so the integral is
// sum_p q_p w(x_p).  Boundary grading plus kink breakpoints at the
// diagonal/boundary scale s^{1/alpha}.
void kernel_quadrature(const StableLaw& law, double R, double s, double y,
                       int grade_levels, double grade_ratio, int order,
                       int interior, std::vector<double>& nodes,
                       std::vector<double>& weights);

// int_{B_R} kappa(s, y, x) w(x) dx; shared by the lemma checks and the
// kappa-surrogate oracle
double kernel_bound_integral(const StableLaw& law, double R, double s,
                             double y, const std::function<double(double)>& w,
                             int grade_levels, double grade_ratio,
                             int order = 16, int interior = 16);

struct KilledDensityEstimate {
  std::vector<double> bin_centers;
  std::vector<double> density;   // surviving-mass histogram / bin width
  std::vector<long> counts;
  double survival = 0.0;         // fraction of paths alive at t
  double bin_width = 0.0;
};

KilledDensityEstimate estimate_p_R(const StableLaw& law, double R, double t,
                                   double x, int n_paths, double dt,
                                   int n_bins, std::uint64_t seed);

struct BoundReportRow {
  std::string lemma_id;
  double alpha = 0.0;
  double R = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
  int refinement_level = 0;
  double sup_ratio = 0.0;
};

struct LemmaCheck {
  std::vector<BoundReportRow> rows;  // one row per refinement level
  std::vector<double> trace;         // sup_ratio per level
  bool diverging = false;            // trace grew across all refinements
  bool noisy = false;                // Monte Carlo error dominates (3.5 only)
};

// sup over (s,y) of (R-|y|+s^{1/alpha})^{gamma alpha} *
//   int_{B_R} kappa(s,y,x) (R-|x|)^{-gamma alpha} dx
// recomputed with successively deeper boundary grading (ratio halved per
// level).  Admissible gamma < 1/alpha + 1/2 gives a stable trace; larger
// gamma makes it grow without bound.
LemmaCheck check_lemma34(const StableLaw& law, double R, double gamma,
                         const std::vector<double>& s_grid,
                         const std::vector<double>& y_grid, int levels = 4);

// Monte Carlo check of |P_s^R f_R - f_R| <= C ((R-|x|)^{-alpha} wedge
// s (R-|x|)^{-2alpha}): paths from each grid x, difference estimator
// mean[f_R(Y_s) 1{alive} - f_R(x)].  Reports the fitted constant per s.
struct Lemma35Result {
  std::vector<double> s_values;
  std::vector<double> fitted_constant;  // sup_x |estimate| / envelope
  std::vector<double> worst_stderr_ratio;  // 3*stderr / |estimate| at argmax
  bool noisy = false;
  std::vector<BoundReportRow> rows;
};

Lemma35Result check_lemma35(const StableLaw& law, double R,
                            const std::vector<double>& s_values,
                            const std::vector<double>& x_grid, int n_paths,
                            int steps_per_s, std::uint64_t seed);

// sup over (t,y) of t^{-rho} (R-|y|+t^{1/alpha})^{(1+gamma+rho) alpha} *
//   int_0^t du int_{B_R} kappa(t-u,y,x) (R-|x|+u^{1/alpha})^{-(2+gamma)alpha} dx
// Gate: 0 <= gamma < 1/alpha - 1/2 and 0 <= rho <= min(1, 1/alpha - gamma).
LemmaCheck check_lemma36(const StableLaw& law, double R, double gamma,
                         double rho, const std::vector<double>& t_grid,
                         const std::vector<double>& y_grid, int levels = 3,
                         bool enforce_gate = true);

}  // namespace ssp
