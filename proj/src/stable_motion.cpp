#include "ssp/stable_motion.hpp"

#include <cmath>
#include <stdexcept>

namespace ssp {

double sample_standard(const StableLaw& law, RngStream& rng) {
  const double a = law.alpha;
  const double V = M_PI * (rng.u01() - 0.5);
  if (a == 1.0) return std::tan(V);
  const double W = rng.exponential();
  const double cv = std::cos(V);
  const double x = std::sin(a * V) / std::pow(cv, 1.0 / a);
  const double y = std::pow(std::cos((1.0 - a) * V) / W, (1.0 - a) / a);
  return x * y;
}

double sample_increment(const StableLaw& law, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt > 0");
  return std::pow(dt, 1.0 / law.alpha) * sample_standard(law, rng);
}

double exit_right_probability(double alpha, double x, double R) {
  const double pr = std::pow(R - x, -alpha);
  const double pl = std::pow(R + x, -alpha);
  return pr / (pr + pl);
}

double sample_exit_jump(const StableLaw& law, double x, double R,
                        RngStream& rng) {
  if (!(std::abs(x) < R)) throw std::invalid_argument("sample_exit_jump: |x| < R");
  const double a = law.alpha;
  const double u = rng.u01();
  if (rng.u01() < exit_right_probability(a, x, R))
    return x + (R - x) * std::pow(u, -1.0 / a);
  return x - (R + x) * std::pow(u, -1.0 / a);
}

KilledPath sample_killed_path(const StableLaw& law, double x0, double R,
                              double T, double dt, RngStream& rng) {
  if (!(std::abs(x0) < R))
    throw std::invalid_argument("sample_killed_path: |x0| < R");
  KilledPath p;
  const int n = static_cast<int>(std::llround(T / dt));
  p.times.reserve(n + 1);
  p.positions.reserve(n + 1);
  double x = x0;
  p.times.push_back(0.0);
  p.positions.push_back(x);
  const double scale = std::pow(dt, 1.0 / law.alpha);
  for (int k = 1; k <= n; ++k) {
    x += scale * sample_standard(law, rng);
    if (std::abs(x) >= R) {
      p.exited = true;
      p.exit_time = k * dt;
      return p;
    }
    p.times.push_back(k * dt);
    p.positions.push_back(x);
  }
  return p;
}

double killed_endpoint(const StableLaw& law, double x0, double R, double T,
                       double dt, RngStream& rng, bool& alive) {
  double x = x0;
  const int n = static_cast<int>(std::llround(T / dt));
  const double scale = std::pow(dt, 1.0 / law.alpha);
  for (int k = 0; k < n; ++k) {
    x += scale * sample_standard(law, rng);
    if (std::abs(x) >= R) {
      alive = false;
      return x;
    }
  }
  alive = true;
  return x;
}

std::vector<double> sup_tail(const StableLaw& law,
                             const std::vector<double>& rs, int n_paths,
                             double dt, std::uint64_t seed) {
  const int n = static_cast<int>(std::llround(1.0 / dt));
  const double scale = std::pow(dt, 1.0 / law.alpha);
  std::vector<long> hits(rs.size(), 0);
  for (int p = 0; p < n_paths; ++p) {
    RngStream rng(seed, static_cast<std::uint64_t>(p));
    double x = 0.0, sup = 0.0;
    for (int k = 0; k < n; ++k) {
      x += scale * sample_standard(law, rng);
      if (x > sup) sup = x;
    }
    for (size_t i = 0; i < rs.size(); ++i)
      if (sup >= rs[i]) ++hits[i];
  }
  std::vector<double> out(rs.size());
  for (size_t i = 0; i < rs.size(); ++i)
    out[i] = std::pow(rs[i], law.alpha) * hits[i] / n_paths;
  return out;
}

}  // namespace ssp
