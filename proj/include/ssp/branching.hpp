#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssp/common.hpp"
#include "ssp/rng.hpp"
#include "ssp/stable_law.hpp"

namespace ssp {

// lineage tags used by the V/W decomposition; plain runs leave label_V
enum : std::uint8_t { label_V = 0, label_W = 1 };

struct Particle {
  double x;
  std::uint8_t label = label_V;
};

// Branching particle system: every particle carries mass mass_unit = 1/N.
// Critical binary branching at rate N: per step of size dt each particle
// dies with probability N*dt/2 and splits with probability N*dt/2, so the
// total mass is a martingale and the branching variance matches the
// superprocess quadratic variation d<M> = M dt.
struct ParticlePopulation {
  std::vector<Particle> particles;
  double mass_unit = 0.0;
  double time = 0.0;

  double total_mass() const { return mass_unit * particles.size(); }
  long count() const { return static_cast<long>(particles.size()); }
};

// Build a population approximating mu with N particles per unit mass
// (atom counts rounded to nearest).
ParticlePopulation make_population(const std::vector<Atom>& mu, int N);

struct EvolveOptions {
  // remove particles that land outside (-R, R) when set
  std::optional<double> kill_radius;
  // hard failure (CapExceeded) instead of silent truncation
  std::size_t max_particles = 5'000'000;
};

// One step: stable move, optional kill at the radius, then critical binary
// branching.  Throws GateError if N*dt > 0.5, CapExceeded past the cap.
void evolve_population(ParticlePopulation& pop, const StableLaw& law,
                       double dt, RngStream& rng,
                       const EvolveOptions& opts = {});

// Partition by |x| < K vs |x| >= K; masses preserved.
void split_initial(const ParticlePopulation& pop, double K,
                   ParticlePopulation& inside, ParticlePopulation& outside);

// P(zeta <= t) = exp(-2 m0 / t) for the Feller total-mass diffusion started
// at m0; returned here as the survival complement P(zeta > t).
double extinction_probability_formula(double m0, double t);

struct MassPath {
  std::vector<double> times;
  std::vector<double> mass;
  bool extinct = false;
  double extinction_time = -1.0;  // valid when extinct

  // mass at the largest recorded time <= t (paths are absorbed at 0)
  double mass_at(double t) const;
};

// Euler-Maruyama for dM = sqrt(M^+) dbeta, truncated at 0 and absorbed.
MassPath simulate_feller_mass(double m0, double T, double dt, RngStream& rng);

// Total-mass path of the branching particle system as the exact
// count chain: positions do not influence branching, so the particle
// count n evolves by D ~ Binomial(n, p) deaths and S ~ Binomial(n-D,
// p/(1-p)) splits with p = N*dt/2.  Same law as evolve_population's
// total mass at a fraction of the cost.
MassPath simulate_population_mass(double m0, int N, double T, double dt,
                                  RngStream& rng,
                                  long max_count = 50'000'000);

}  // namespace ssp
