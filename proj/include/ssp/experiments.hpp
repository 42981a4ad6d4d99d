#pragma once

#include <limits>
#include <vector>

#include "ssp/bessel.hpp"
#include "ssp/branching.hpp"
#include "ssp/common.hpp"
#include "ssp/stable_law.hpp"

namespace ssp {

// Probe function attached to a lattice center y at scale r: vanishes within
// distance r/4 of y, equals 1 beyond r/2, and interpolates linearly between.
// A population with a small probe average is concentrated near y.
double ring_indicator(double x, double y, double r);

// Watches a population for the first grid time at which the total mass lies
// in (0, epsilon] while some lattice center x_k (pitch r/4 on
// [-lattice_half_width, lattice_half_width]) has probe average
// X(ring_indicator(., x_k, r)) / X(1) <= epsilon^3.  The smallest qualifying
// center index is latched together with the trigger time and mass.
class TauDetector {
 public:
  TauDetector(double epsilon, double r, double lattice_half_width);

  // Evaluates the trigger at the population's current time; latches and
  // returns true on the first hit (and on every later call).
  bool check(const ParticlePopulation& pop);

  bool triggered() const { return triggered_; }
  double tau_time() const { return tau_time_; }
  long center_index() const { return center_index_; }
  double center_x() const { return center_x_; }
  double mu_mass() const { return mu_mass_; }

 private:
  double epsilon_;
  double r_;
  double half_width_;
  bool triggered_ = false;
  double tau_time_ = std::numeric_limits<double>::quiet_NaN();
  long center_index_ = 0;
  double center_x_ = std::numeric_limits<double>::quiet_NaN();
  double mu_mass_ = 0.0;
};

// Rolling record of the last few nonempty populations of a run, used to
// locate the terminal clump.  Particle positions are retained only while the
// population is small; the first moment and mass are always retained.
class PopulationTail {
 public:
  explicit PopulationTail(int keep = 5, long detail_cap = 64);

  void observe(const ParticlePopulation& pop);

  struct Snapshot {
    double time;
    double first_moment;  // sum of position * particle mass
    double mass;
    std::vector<double> xs;  // positions; empty when count exceeded the cap
  };

  const std::vector<Snapshot>& snapshots() const { return snaps_; }
  bool empty() const { return snaps_.empty(); }

 private:
  int keep_;
  long detail_cap_;
  std::vector<Snapshot> snaps_;
};

struct SupportEstimate {
  double f_hat;       // mass-weighted centroid over the retained snapshots
  double last_time;   // time of the most recent retained snapshot
  int n_snapshots;
};

// Mass-weighted centroid of the retained tail.  Translation-equivariant:
// shifting every particle by c shifts f_hat by c.  Throws ConfigError on an
// empty tail.
SupportEstimate estimate_F(const PopulationTail& tail);

// Fraction of the final retained snapshot's mass within `radius` of
// `center`; NaN when no positional detail was retained.
double concentration_within(const PopulationTail& tail, double center,
                            double radius);

// ---------------------------------------------------------------------------
// Exceptional-time proxy experiment: split the initial measure at the body
// B(0, K), evolve the inner part with the boundary decomposition at radius R
// and the outer part as a plain total-mass chain, and look for grid times in
// (epsilon^2, epsilon) at which the relabeled (W) component is extinct while
// the inner (V) component is alive.
// ---------------------------------------------------------------------------

struct Theorem11Config {
  StableLaw law;
  double epsilon = 0.2;
  double inner_radius = 1.0;          // K: split radius for the initial mass
  double decomposition_radius = 4.0;  // R: must exceed 2K + 1
  std::vector<Atom> initial;          // initial measure
  long particles_per_unit = 500;      // N
  double dt = 1e-3;
  int n_replicas = 1000;
  unsigned long long seed = 1;
  long max_particles = 5'000'000;

  // Throws GateError when a parameter leaves its admissible range.
  void validate() const;
};

struct Theorem11Replica {
  bool outer_dead_early;   // outer part extinct by epsilon^2
  bool inner_alive_late;   // inner part alive at epsilon
  bool gate_joint;         // both of the above
  bool detected;           // some window grid time has W extinct, V alive
  double first_detect_time;  // NaN when !detected
  int n_detect_times;
};

struct Theorem11Summary {
  double epsilon;
  int n_replicas;
  double gate_freq;  // fraction with gate_joint
  double gate_se;
  double q;          // fraction detected
  double q_se;
  std::vector<Theorem11Replica> replicas;
  std::vector<double> pooled_detect_times;  // detection grid times, all replicas
};

Theorem11Summary run_theorem11(const Theorem11Config& cfg);

// ---------------------------------------------------------------------------
// Near-extinction experiment: run the free system until the detector fires,
// recenter at the selected lattice point, split at r/2, evolve the inner part
// with the boundary decomposition at radius r through the mass-scaled window
// (epsilon^2 mu, epsilon mu), then follow it to extinction to place the
// terminal clump.
// ---------------------------------------------------------------------------

struct Theorem12Config {
  StableLaw law;
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  double r = 0.5;                   // probe scale; lattice pitch is r/4
  double lattice_half_width = 500.0;
  std::vector<Atom> initial;        // initial measure
  long particles_per_unit = 250;    // N
  double dt = 2e-3;                 // first-phase step
  double t_max = 6.0;               // first-phase horizon
  int n_replicas = 1000;
  unsigned long long seed = 1;
  long max_particles = 5'000'000;
  int window_start_points = 20;     // grid points before the window opens
  double followup_horizon_factor = 100.0;  // extinction cap, units of mu

  void validate() const;
};

struct Theorem12Replica {
  bool tau_found = false;
  double tau_time = std::numeric_limits<double>::quiet_NaN();
  double center_x = std::numeric_limits<double>::quiet_NaN();
  double mu_mass = 0.0;
  bool outer_empty = false;       // no recentred mass beyond r/2
  bool inner_majority = false;    // recentred inner mass >= mu/2
  bool window_gate = false;       // outer dead by eps^2 mu, inner alive at eps mu
  bool detected = false;          // W extinct & V alive at a window grid time
  double first_detect_time = std::numeric_limits<double>::quiet_NaN();
  int n_detect_times = 0;
  bool extinction_resolved = false;
  double f_hat = std::numeric_limits<double>::quiet_NaN();
  bool support_confined = false;  // detection supports within 3r of f_hat
};

struct Theorem12Summary {
  double epsilon;
  int n_triggered;      // replicas whose detector fired
  double gate_freq;     // window_gate fraction among triggered
  double gate_se;
  double q;             // detected fraction among triggered
  double q_se;
  double confined_frac; // support_confined among detected & resolved
  std::vector<Theorem12Replica> replicas;  // one per replica (incl. untriggered)
  std::vector<double> pooled_detect_times; // times since restart
};

struct Theorem12Result {
  int n_replicas;
  int n_phase1_unresolved;  // replicas where some detector never fired
  std::vector<Theorem12Summary> per_epsilon;
};

Theorem12Result run_theorem12(const Theorem12Config& cfg);

// Box-counting dimension estimate of a pooled set of detected times
// restricted to [window_lo, window_hi].  Mirrors the gating of
// box_dimension; flagged unreliable when the set is empty or too sparse.
DimensionEstimate dimension_of_detected_set(const std::vector<double>& times,
                                            double window_lo, double window_hi,
                                            const std::vector<double>& scales);

}  // namespace ssp
