#include "ssp/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ssp/quadrature.hpp"
#include "ssp/stable_motion.hpp"

namespace ssp {

// ---- StableDensity ------------------------------------------------------

StableDensity::StableDensity(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("StableDensity: alpha in (0,2)");
  xi_max_ = std::pow(32.24, 1.0 / alpha);  // exp(-xi^alpha) < 1e-14 beyond
  // Beyond the switch point the tail series beats the oscillatory Fourier
  // integral; for alpha > 1 the series is asymptotic, so it is deferred to
  // larger |x| where optimal truncation is far below double precision.
  x_switch_ = (alpha <= 1.0) ? 2.0 : 20.0;
}

double StableDensity::fourier(double x) const {
  const double ax = std::abs(x);
  auto f = [&](double xi) {
    return std::exp(-std::pow(xi, alpha_)) * std::cos(xi * ax);
  };
  std::vector<double> breaks{0.0};
  if (ax * xi_max_ < M_PI) {
    for (int i = 1; i <= 16; ++i) breaks.push_back(xi_max_ * i / 16.0);
  } else {
    const double half_period = M_PI / ax;
    // a few sub-panels before the first zero-crossing region
    for (int i = 1; i <= 4; ++i) breaks.push_back(half_period * i / 4.0);
    double xi = half_period;
    while (xi < xi_max_) {
      xi += half_period;
      breaks.push_back(std::min(xi, xi_max_));
    }
  }
  return integrate_panels(f, breaks, 8) / M_PI;
}

double StableDensity::series_tail(double x) const {
  // Series in |x|^{-alpha}: convergent for alpha <= 1 (|x| beyond the switch
  // point), asymptotic for alpha > 1 where it is summed to the smallest term.
  // Terms with sin(k pi alpha / 2) ~ 0 are spurious near-zeros, so the stop
  // rule requires two consecutive negligible terms.
  const double ax = std::abs(x);
  double sum = 0.0;
  double sign = 1.0;
  double prev_mag = std::numeric_limits<double>::infinity();
  int small_streak = 0;
  for (int k = 1; k <= 200; ++k) {
    const double lg = std::lgamma(k * alpha_ + 1.0) - std::lgamma(k + 1.0);
    const double term = sign * std::exp(lg - (k * alpha_ + 1.0) * std::log(ax)) *
                        std::sin(0.5 * M_PI * k * alpha_);
    const double mag = std::abs(term);
    const bool significant = mag >= 1e-17 * std::abs(sum) + 1e-300;
    if (alpha_ > 1.0 && significant && mag > prev_mag)
      break;  // asymptotic regime: truncate at the smallest term
    sum += term;
    if (significant) {
      prev_mag = mag;
      small_streak = 0;
    } else if (++small_streak >= 2) {
      break;
    }
    sign = -sign;
  }
  return sum / M_PI;
}

double StableDensity::p1(double x) const {
  const double ax = std::abs(x);
  if (ax <= x_switch_) return fourier(x);
  return series_tail(x);
}

double StableDensity::operator()(double t, double x) const {
  if (!(t > 0.0)) throw std::invalid_argument("StableDensity: t > 0");
  const double s = std::pow(t, -1.0 / alpha_);
  return s * p1(s * x);
}

// ---- grid helpers -------------------------------------------------------

namespace {

std::vector<double> symmetric_graded_grid(double L, int n) {
  // uniform core on [-L/8, L/8], geometric to +-L
  if (n < 9 || n % 2 == 0)
    throw std::invalid_argument("grid: need odd n >= 9");
  const int half = (n - 1) / 2;
  const int core = (2 * half) / 3;
  const double c = L / 8.0;
  std::vector<double> pos;
  for (int i = 1; i <= core; ++i) pos.push_back(c * i / core);
  const int outer = half - core;
  const double ratio = std::pow(L / c, 1.0 / outer);
  double v = c;
  for (int i = 1; i <= outer; ++i) {
    v *= ratio;
    pos.push_back(std::min(v, L));
  }
  std::vector<double> g;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) g.push_back(-*it);
  g.push_back(0.0);
  for (double p : pos) g.push_back(p);
  return g;
}

double lerp_clamped(const std::vector<double>& xs, const std::vector<double>& ys,
                    double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const size_t i = static_cast<size_t>(it - xs.begin());
  const double x0 = xs[i - 1], x1 = xs[i];
  const double w = (x - x0) / (x1 - x0);
  return (1.0 - w) * ys[i - 1] + w * ys[i];
}

// scatter weight q at point x onto the hat-function basis of xs (clamped)
void hat_scatter(const std::vector<double>& xs, double x, double q,
                 double* row) {
  if (x <= xs.front()) {
    row[0] += q;
    return;
  }
  if (x >= xs.back()) {
    row[xs.size() - 1] += q;
    return;
  }
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const size_t i = static_cast<size_t>(it - xs.begin());
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  row[i - 1] += (1.0 - w) * q;
  row[i] += w * q;
}

}  // namespace

std::vector<double> SemigroupOracle::matrix(double t) const {
  const size_t G = grid_.size();
  std::vector<double> M(G * G, 0.0);
  std::vector<double> e(G, 0.0);
  for (size_t k = 0; k < G; ++k) {
    e[k] = 1.0;
    const std::vector<double> col = apply(e, t);
    e[k] = 0.0;
    for (size_t i = 0; i < G; ++i) M[i * G + k] = col[i];
  }
  return M;
}

// ---- FullSpaceOracle ----------------------------------------------------

FullSpaceOracle::FullSpaceOracle(const StableLaw& law, double L, int n_grid,
                                 int half_octaves)
    : law_(law), L_(L), half_octaves_(half_octaves), density_(law.alpha) {
  grid_ = symmetric_graded_grid(L, n_grid);
}

void FullSpaceOracle::quad_nodes(double t, std::vector<double>& z,
                                 std::vector<double>& w) const {
  const double scale = std::pow(t, 1.0 / law_.alpha);
  std::vector<double> breaks{0.0};
  for (int i = 1; i <= 4; ++i) breaks.push_back(scale * i / 4.0);
  double b = scale;
  for (int k = 0; k < half_octaves_; ++k) {
    b *= M_SQRT2;
    breaks.push_back(b);
  }
  const GaussRule& rule = gauss_legendre(8);
  z.clear();
  w.clear();
  double mass = 0.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double c = 0.5 * (breaks[i] + breaks[i + 1]);
    const double h = 0.5 * (breaks[i + 1] - breaks[i]);
    for (size_t q = 0; q < rule.nodes.size(); ++q) {
      const double zq = c + h * rule.nodes[q];
      const double wq = h * rule.weights[q] * density_(t, zq);
      z.push_back(zq);
      w.push_back(wq);
      z.push_back(-zq);
      w.push_back(wq);
      mass += 2.0 * wq;
    }
  }
  for (double& x : w) x /= mass;  // sub-probability -> exact Markov weights
}

std::vector<double> FullSpaceOracle::apply(const std::vector<double>& g,
                                           double t) const {
  if (g.size() != grid_.size()) throw std::invalid_argument("apply: size");
  if (t == 0.0) return g;
  std::vector<double> z, w;
  quad_nodes(t, z, w);
  std::vector<double> out(grid_.size(), 0.0);
  for (size_t i = 0; i < grid_.size(); ++i) {
    double s = 0.0;
    for (size_t j = 0; j < z.size(); ++j)
      s += w[j] * lerp_clamped(grid_, g, grid_[i] + z[j]);
    out[i] = s;
  }
  return out;
}

std::vector<double> FullSpaceOracle::apply_fn(
    const std::function<double(double)>& phi, double t) const {
  std::vector<double> out(grid_.size());
  if (t == 0.0) {
    for (size_t i = 0; i < grid_.size(); ++i) out[i] = phi(grid_[i]);
    return out;
  }
  std::vector<double> z, w;
  quad_nodes(t, z, w);
  for (size_t i = 0; i < grid_.size(); ++i) {
    double s = 0.0;
    for (size_t j = 0; j < z.size(); ++j) s += w[j] * phi(grid_[i] + z[j]);
    out[i] = s;
  }
  return out;
}

double FullSpaceOracle::point_value(const std::function<double(double)>& phi,
                                    double t, double x) const {
  if (t == 0.0) return phi(x);
  std::vector<double> z, w;
  quad_nodes(t, z, w);
  double s = 0.0;
  for (size_t j = 0; j < z.size(); ++j) s += w[j] * phi(x + z[j]);
  return s;
}

std::vector<double> FullSpaceOracle::matrix(double t) const {
  const size_t G = grid_.size();
  std::vector<double> M(G * G, 0.0);
  if (t == 0.0) {
    for (size_t i = 0; i < G; ++i) M[i * G + i] = 1.0;
    return M;
  }
  std::vector<double> z, w;
  quad_nodes(t, z, w);
  for (size_t i = 0; i < G; ++i) {
    double* row = &M[i * G];
    for (size_t j = 0; j < z.size(); ++j)
      hat_scatter(grid_, grid_[i] + z[j], w[j], row);
  }
  return M;
}

// ---- KappaKilledOracle --------------------------------------------------

KappaKilledOracle::KappaKilledOracle(const StableLaw& law, double R,
                                     int grade_levels, double grade_ratio,
                                     int interior)
    : law_(law),
      R_(R),
      grade_levels_(grade_levels),
      grade_ratio_(grade_ratio),
      interior_(interior) {
  grid_ = graded_breaks(-R, R, true, true, grade_levels, grade_ratio, interior);
  grid_.erase(grid_.begin());  // keep strictly interior points
  grid_.pop_back();
}

std::vector<double> KappaKilledOracle::apply(const std::vector<double>& g,
                                             double t) const {
  if (g.size() != grid_.size()) throw std::invalid_argument("apply: size");
  if (t == 0.0) return g;
  std::vector<double> out(grid_.size());
  auto w = [&](double x) { return lerp_clamped(grid_, g, x); };
  for (size_t i = 0; i < grid_.size(); ++i)
    out[i] = kernel_bound_integral(law_, R_, t, grid_[i], w, grade_levels_,
                                   grade_ratio_, 8, interior_);
  return out;
}

std::vector<double> KappaKilledOracle::apply_fn(
    const std::function<double(double)>& phi, double t) const {
  std::vector<double> out(grid_.size());
  if (t == 0.0) {
    for (size_t i = 0; i < grid_.size(); ++i) out[i] = phi(grid_[i]);
    return out;
  }
  for (size_t i = 0; i < grid_.size(); ++i)
    out[i] = kernel_bound_integral(law_, R_, t, grid_[i], phi, grade_levels_,
                                   grade_ratio_, 8, interior_);
  return out;
}

std::vector<double> KappaKilledOracle::matrix(double t) const {
  const size_t G = grid_.size();
  std::vector<double> M(G * G, 0.0);
  if (t == 0.0) {
    for (size_t i = 0; i < G; ++i) M[i * G + i] = 1.0;
    return M;
  }
  std::vector<double> nodes, weights;
  for (size_t i = 0; i < G; ++i) {
    kernel_quadrature(law_, R_, t, grid_[i], grade_levels_, grade_ratio_, 8,
                      interior_, nodes, weights);
    double* row = &M[i * G];
    for (size_t p = 0; p < nodes.size(); ++p)
      hat_scatter(grid_, nodes[p], weights[p], row);
  }
  return M;
}

// ---- PathKilledOracle ---------------------------------------------------

PathKilledOracle::PathKilledOracle(const StableLaw& law, double R, int n_paths,
                                   int steps, std::uint64_t seed, int n_grid)
    : law_(law), R_(R), n_paths_(n_paths), steps_(steps), seed_(seed) {
  for (int i = 1; i <= n_grid; ++i)
    grid_.push_back(-R + 2.0 * R * i / (n_grid + 1));
}

std::vector<double> PathKilledOracle::apply_fn(
    const std::function<double(double)>& phi, double t) const {
  std::vector<double> out(grid_.size());
  if (t == 0.0) {
    for (size_t i = 0; i < grid_.size(); ++i) out[i] = phi(grid_[i]);
    return out;
  }
  const double dt = t / steps_;
  std::uint64_t stream = 0;
  for (size_t i = 0; i < grid_.size(); ++i) {
    double sum = 0.0;
    for (int p = 0; p < n_paths_; ++p) {
      RngStream rng(seed_, stream++);
      bool alive = false;
      const double y = killed_endpoint(law_, grid_[i], R_, t, dt, rng, alive);
      if (alive) sum += phi(y);
    }
    out[i] = sum / n_paths_;
  }
  return out;
}

std::vector<double> PathKilledOracle::apply(const std::vector<double>& g,
                                            double t) const {
  auto phi = [&](double x) { return lerp_clamped(grid_, g, x); };
  return apply_fn(phi, t);
}

// ---- v_n recursion ------------------------------------------------------

VnTable compute_vn(const SemigroupOracle& oracle,
                   const std::function<double(double)>& phi, double s,
                   int n_max, int time_panels) {
  if (n_max < 1 || n_max > 4) throw std::invalid_argument("compute_vn: n_max");
  if (!(s > 0.0)) throw std::invalid_argument("compute_vn: s > 0");
  if (time_panels < 2) throw std::invalid_argument("compute_vn: panels >= 2");
  VnTable tab;
  const size_t m = static_cast<size_t>(time_panels) + 1;
  const double h = s / time_panels;
  tab.times.resize(m);
  for (size_t j = 0; j < m; ++j) tab.times[j] = h * j;
  tab.times.back() = s;
  const size_t G = oracle.grid().size();

  // one transition matrix per lag r*h; lag 0 is the identity and is applied
  // in place in the convolution below
  std::vector<std::vector<double>> K(m);
  if (n_max >= 2)
    for (size_t r = 1; r < m; ++r) K[r] = oracle.matrix(tab.times[r]);

  tab.values.assign(n_max, std::vector<std::vector<double>>(
                               m, std::vector<double>()));
  for (size_t j = 0; j < m; ++j)
    tab.values[0][j] = oracle.apply_fn(phi, tab.times[j]);
  static const double binom[5][5] = {{0, 0, 0, 0, 0},
                                     {1, 1, 0, 0, 0},
                                     {1, 2, 1, 0, 0},
                                     {1, 3, 3, 1, 0},
                                     {1, 4, 6, 4, 1}};
  for (int n = 2; n <= n_max; ++n) {
    // products sum_k C(n-1,k) v_k(u) v_{n-k}(u) at every time node
    std::vector<std::vector<double>> prod(m, std::vector<double>(G, 0.0));
    for (size_t q = 0; q < m; ++q) {
      for (int k = 1; k <= n - 1; ++k) {
        const double c = binom[n - 1][k];
        const auto& a = tab.values[k - 1][q];
        const auto& b = tab.values[n - k - 1][q];
        for (size_t i = 0; i < G; ++i) prod[q][i] += c * a[i] * b[i];
      }
    }
    tab.values[n - 1][0].assign(G, 0.0);
    for (size_t j = 1; j < m; ++j) {
      std::vector<double> acc(G, 0.0);
      for (size_t q = 0; q <= j; ++q) {
        const double tau = (q == 0 || q == j) ? 0.5 * h : h;
        if (q == j) {
          for (size_t i = 0; i < G; ++i) acc[i] += tau * prod[q][i];
          continue;
        }
        const std::vector<double>& Kr = K[j - q];
        const std::vector<double>& g = prod[q];
        for (size_t i = 0; i < G; ++i) {
          const double* row = &Kr[i * G];
          double dot = 0.0;
          for (size_t k = 0; k < G; ++k) dot += row[k] * g[k];
          acc[i] += tau * dot;
        }
      }
      tab.values[n - 1][j] = std::move(acc);
    }
  }
  return tab;
}

double pair_measure(const std::vector<Atom>& mu,
                    const std::vector<double>& grid,
                    const std::vector<double>& g) {
  double s = 0.0;
  for (const Atom& a : mu) s += a.mass * lerp_clamped(grid, g, a.x);
  return s;
}

std::vector<double> raw_moments_from_vn(const VnTable& table,
                                        const std::vector<Atom>& mu,
                                        const std::vector<double>& grid,
                                        int n_max) {
  std::vector<double> v(5, 0.0);
  for (int n = 1; n <= n_max; ++n)
    v[n] = pair_measure(mu, grid, table.final(n));
  std::vector<double> out;
  out.push_back(v[1]);
  if (n_max >= 2) out.push_back(v[2] + v[1] * v[1]);
  if (n_max >= 3) out.push_back(v[3] + 3.0 * v[2] * v[1] + std::pow(v[1], 3));
  if (n_max >= 4)
    out.push_back(v[4] + 4.0 * v[3] * v[1] + 3.0 * v[2] * v[2] +
                  6.0 * v[2] * v[1] * v[1] + std::pow(v[1], 4));
  return out;
}

// ---- envelope checks ----------------------------------------------------

VnEnvelopeReport check_vn_envelopes(const StableLaw& law, double R,
                                    const std::vector<double>& s_grid,
                                    double eps0, int time_panels) {
  const double a = law.alpha;
  if (!(a > 0.0 && a < 2.0 / 3.0))
    throw GateError("check_vn_envelopes: alpha in (0, 2/3)");
  if (!(eps0 > 0.0 && eps0 < std::min(1.0, 1.0 / a - 1.5)))
    throw GateError(
        "check_vn_envelopes: eps0 in (0, min(1, 1/alpha - 3/2))");
  const double d0 = (1.0 + eps0) / 4.0;
  KappaKilledOracle oracle(law, R);
  auto fR = [&](double x) { return boundary_flux(law, R, x); };

  VnEnvelopeReport rep;
  auto run = [&](int panels) {
    std::vector<double> fitted(5, 0.0);
    for (double s : s_grid) {
      VnTable tab = compute_vn(oracle, fR, s, 4, panels);
      const auto& grid = oracle.grid();
      for (int n = 1; n <= 4; ++n) {
        const auto& vn = tab.final(n);
        const double spow = (n == 1) ? 0.0 : (n - 1) * d0;
        const double epow = (n == 1) ? a : (1.0 + (n - 1) * d0) * a;
        for (size_t i = 0; i < grid.size(); ++i) {
          const double env = std::pow(s, spow) *
                             std::pow(R - std::abs(grid[i]) +
                                          std::pow(s, 1.0 / a),
                                      -epow);
          fitted[n] = std::max(fitted[n], vn[i] / env);
        }
      }
    }
    return fitted;
  };
  auto f1 = run(time_panels);
  auto f2 = run(2 * time_panels);
  rep.fitted.assign(f1.begin() + 1, f1.end());
  rep.fitted_refined.assign(f2.begin() + 1, f2.end());
  rep.stable = true;
  for (int n = 1; n <= 4; ++n) {
    if (!(std::isfinite(f2[n])) || f2[n] <= 0.0) rep.stable = false;
    if (std::abs(f2[n] - f1[n]) > 0.15 * std::abs(f2[n])) rep.stable = false;
    rep.rows.push_back({"vn-envelope-n" + std::to_string(n), a, R,
                        (n == 1) ? 1.0 : (n - 1) * d0, 0.0, 0, f1[n]});
    rep.rows.push_back({"vn-envelope-n" + std::to_string(n), a, R,
                        (n == 1) ? 1.0 : (n - 1) * d0, 0.0, 1, f2[n]});
  }
  return rep;
}

}  // namespace ssp
