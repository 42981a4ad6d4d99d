#include "ssp/branching.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ssp/stable_motion.hpp"

namespace ssp {

ParticlePopulation make_population(const std::vector<Atom>& mu, int N) {
  if (N <= 0) throw GateError("make_population: N > 0");
  ParticlePopulation pop;
  pop.mass_unit = 1.0 / N;
  for (const Atom& a : mu) {
    if (a.mass < 0.0) throw GateError("make_population: mass >= 0");
    const long k = std::lround(a.mass * N);
    for (long i = 0; i < k; ++i) pop.particles.push_back({a.x, label_V});
  }
  return pop;
}

void evolve_population(ParticlePopulation& pop, const StableLaw& law,
                       double dt, RngStream& rng, const EvolveOptions& opts) {
  if (!(dt > 0.0)) throw GateError("evolve_population: dt > 0");
  const double N = 1.0 / pop.mass_unit;
  const double p = 0.5 * N * dt;
  if (!(p <= 0.25)) throw GateError("evolve_population: need N*dt <= 0.5");
  std::vector<Particle> next;
  next.reserve(pop.particles.size() + pop.particles.size() / 8 + 16);
  for (Particle q : pop.particles) {
    q.x += sample_increment(law, dt, rng);
    if (opts.kill_radius && std::abs(q.x) >= *opts.kill_radius) continue;
    const double u = rng.u01();
    if (u < p) continue;  // death
    next.push_back(q);
    if (u >= 1.0 - p) next.push_back(q);  // split
  }
  if (next.size() > opts.max_particles)
    throw CapExceeded("evolve_population: particle cap exceeded");
  pop.particles = std::move(next);
  pop.time += dt;
}

void split_initial(const ParticlePopulation& pop, double K,
                   ParticlePopulation& inside, ParticlePopulation& outside) {
  if (!(K > 0.0)) throw GateError("split_initial: K > 0");
  inside.particles.clear();
  outside.particles.clear();
  inside.mass_unit = outside.mass_unit = pop.mass_unit;
  inside.time = outside.time = pop.time;
  for (const Particle& q : pop.particles)
    (std::abs(q.x) < K ? inside : outside).particles.push_back(q);
}

double extinction_probability_formula(double m0, double t) {
  if (m0 < 0.0) throw GateError("extinction_probability_formula: m0 >= 0");
  if (!(t > 0.0)) throw GateError("extinction_probability_formula: t > 0");
  return 1.0 - std::exp(-2.0 * m0 / t);
}

double MassPath::mass_at(double t) const {
  if (times.empty() || t < times.front()) return 0.0;
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const size_t i = static_cast<size_t>(it - times.begin());
  return mass[i - 1];
}

MassPath simulate_feller_mass(double m0, double T, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw GateError("simulate_feller_mass: dt > 0");
  if (m0 < 0.0) throw GateError("simulate_feller_mass: m0 >= 0");
  MassPath out;
  const long steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  out.times.reserve(steps + 1);
  out.mass.reserve(steps + 1);
  double m = m0, t = 0.0;
  out.times.push_back(0.0);
  out.mass.push_back(m);
  for (long k = 1; k <= steps; ++k) {
    t = k * dt;
    if (m > 0.0) {
      m += std::sqrt(m * dt) * rng.normal();
      if (m <= 0.0) {
        m = 0.0;
        out.extinct = true;
        out.extinction_time = t;
      }
    }
    out.times.push_back(t);
    out.mass.push_back(m);
    if (m == 0.0) break;  // absorbed; later values are identically 0
  }
  return out;
}

MassPath simulate_population_mass(double m0, int N, double T, double dt,
                                  RngStream& rng, long max_count) {
  if (N <= 0) throw GateError("simulate_population_mass: N > 0");
  if (!(dt > 0.0)) throw GateError("simulate_population_mass: dt > 0");
  const double p = 0.5 * N * dt;
  if (!(p <= 0.25)) throw GateError("simulate_population_mass: N*dt <= 0.5");
  MassPath out;
  long n = std::lround(m0 * N);
  const long steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  out.times.reserve(steps + 1);
  out.mass.reserve(steps + 1);
  out.times.push_back(0.0);
  out.mass.push_back(static_cast<double>(n) / N);
  const double p_split = p / (1.0 - p);
  for (long k = 1; k <= steps; ++k) {
    if (n > 0) {
      const long d = binomial_draw(n, p, rng);
      const long s = (n - d > 0) ? binomial_draw(n - d, p_split, rng) : 0;
      n = n - d + s;
      if (n > max_count)
        throw CapExceeded("simulate_population_mass: count cap exceeded");
      if (n == 0) {
        out.extinct = true;
        out.extinction_time = k * dt;
      }
    }
    out.times.push_back(k * dt);
    out.mass.push_back(static_cast<double>(n) / N);
    if (n == 0) break;
  }
  return out;
}

}  // namespace ssp
