#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ssp/common.hpp"
#include "ssp/dirichlet_kernel.hpp"
#include "ssp/stable_law.hpp"

namespace ssp {

// Density of the standard symmetric alpha-stable law: p_t(x) =
// t^{-1/alpha} p_1(t^{-1/alpha} x).  p_1 is computed by Fourier inversion of
// exp(-|xi|^alpha); for alpha <= 1 the far tail switches to the convergent
// power series sum_k (-1)^{k+1} Gamma(k alpha + 1) sin(k pi alpha / 2)
// x^{-k alpha - 1} / (pi k!).
class StableDensity {
 public:
  explicit StableDensity(double alpha);
  double alpha() const { return alpha_; }
  double p1(double x) const;
  double operator()(double t, double x) const;

 private:
  double series_tail(double x) const;
  double fourier(double x) const;
  double alpha_;
  double x_switch_;
  double xi_max_;
};

// Abstract semigroup P_t acting on functions sampled over a fixed spatial
// grid.  Full-space and path-killed implementations are sub-Markov
// (positivity + contraction); the kappa surrogate is comparable to the
// killed semigroup only up to constants and is used for envelope checks.
class SemigroupOracle {
 public:
  enum class Kind { full_space, killed_path, kappa_surrogate };

  virtual ~SemigroupOracle() = default;
  virtual Kind kind() const = 0;
  const std::vector<double>& grid() const { return grid_; }

  // P_t g for g given by values on grid(); t = 0 returns g
  virtual std::vector<double> apply(const std::vector<double>& g,
                                    double t) const = 0;
  // P_t phi for a callable phi (evaluated exactly at quadrature points)
  virtual std::vector<double> apply_fn(const std::function<double(double)>& phi,
                                       double t) const = 0;
  // Row-major G x G matrix M with (P_t g)(grid[i]) = sum_k M[i*G+k] g[k]
  // for grid-sampled g (linear interpolation between grid points).  Default
  // builds columns by applying the oracle to hat basis vectors; the
  // quadrature-backed oracles override with a direct scatter.
  virtual std::vector<double> matrix(double t) const;

 protected:
  std::vector<double> grid_;
};

class FullSpaceOracle : public SemigroupOracle {
 public:
  FullSpaceOracle(const StableLaw& law, double L, int n_grid = 141,
                  int half_octaves = 48);
  Kind kind() const override { return Kind::full_space; }
  std::vector<double> apply(const std::vector<double>& g,
                            double t) const override;
  std::vector<double> apply_fn(const std::function<double(double)>& phi,
                               double t) const override;
  std::vector<double> matrix(double t) const override;
  double point_value(const std::function<double(double)>& phi, double t,
                     double x) const;

 private:
  void quad_nodes(double t, std::vector<double>& z,
                  std::vector<double>& w) const;
  StableLaw law_;
  double L_;
  int half_octaves_;
  StableDensity density_;
};

// Killed semigroup surrogate built from the comparability envelope kappa.
class KappaKilledOracle : public SemigroupOracle {
 public:
  KappaKilledOracle(const StableLaw& law, double R, int grade_levels = 22,
                    double grade_ratio = 0.7, int interior = 24);
  Kind kind() const override { return Kind::kappa_surrogate; }
  double R() const { return R_; }
  std::vector<double> apply(const std::vector<double>& g,
                            double t) const override;
  std::vector<double> apply_fn(const std::function<double(double)>& phi,
                               double t) const override;
  std::vector<double> matrix(double t) const override;

 private:
  StableLaw law_;
  double R_;
  int grade_levels_;
  double grade_ratio_;
  int interior_;
};

// Killed semigroup by path averaging over surviving killed skeletons.
class PathKilledOracle : public SemigroupOracle {
 public:
  PathKilledOracle(const StableLaw& law, double R, int n_paths, int steps,
                   std::uint64_t seed, int n_grid = 41);
  Kind kind() const override { return Kind::killed_path; }
  std::vector<double> apply(const std::vector<double>& g,
                            double t) const override;
  std::vector<double> apply_fn(const std::function<double(double)>& phi,
                               double t) const override;

 private:
  StableLaw law_;
  double R_;
  int n_paths_;
  int steps_;
  std::uint64_t seed_;
};

// Konno-Shiga moment functions: v_1(s) = P_s phi,
//   v_n(s) = sum_{k=1}^{n-1} C(n-1,k) int_0^s P_{s-u}(v_k(u) v_{n-k}(u)) du,
// computed on a uniform time mesh with the trapezoid rule; the uniform mesh
// makes the time lags repeat, so one transition matrix per lag is
// precomputed and each Volterra term is a mat-vec.
struct VnTable {
  std::vector<double> times;
  // values[n-1][j] = v_n(times[j], .) on the oracle grid
  std::vector<std::vector<std::vector<double>>> values;

  const std::vector<double>& at(int n, int j) const {
    return values[n - 1][j];
  }
  const std::vector<double>& final(int n) const {
    return values[n - 1].back();
  }
};

VnTable compute_vn(const SemigroupOracle& oracle,
                   const std::function<double(double)>& phi, double s,
                   int n_max, int time_panels = 192);

// <mu, g> with g linearly interpolated from oracle-grid values
double pair_measure(const std::vector<Atom>& mu,
                    const std::vector<double>& grid,
                    const std::vector<double>& g);

// Raw moments E<X_s, phi>^n, n = 1..n_max, of the superprocess started at mu,
// assembled from the v_n table (moment duality).
std::vector<double> raw_moments_from_vn(const VnTable& table,
                                        const std::vector<Atom>& mu,
                                        const std::vector<double>& grid,
                                        int n_max);

struct MomentRow {
  double s;
  std::string phi_id;
  int order;
  double recursion_value;
  double mc_value;
  double mc_stderr;
};

// Envelope checks for v_n with phi = f_R under the kappa surrogate:
//   v_1 <= C (R-|y|+s^{1/alpha})^{-alpha},
//   v_n <= C s^{(n-1)d0} (R-|y|+s^{1/alpha})^{-(1+(n-1)d0)alpha}, d0=(1+eps0)/4.
// Gate: alpha in (0, 2/3), 0 < eps0 < min(1, 1/alpha - 3/2).
struct VnEnvelopeReport {
  std::vector<double> fitted;  // per order 1..4: sup ratio over (s, y)
  std::vector<double> fitted_refined;
  bool stable = false;
  std::vector<BoundReportRow> rows;
};

VnEnvelopeReport check_vn_envelopes(const StableLaw& law, double R,
                                    const std::vector<double>& s_grid,
                                    double eps0, int time_panels = 48);

}  // namespace ssp
