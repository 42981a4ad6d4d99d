#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ssp/branching.hpp"
#include "ssp/common.hpp"
#include "ssp/rng.hpp"
#include "ssp/stable_law.hpp"

namespace ssp {

// Per-step record of the labeled (V, W) decomposition X = V + W: V carries
// the lineages that never left (-R, R), W everything descended from exited
// mass; the split is a labeling of one particle system, so v + w = x is an
// exact integer identity at every step.
struct LabeledPoint {
  double time;
  long v_count;
  long w_count;
  long relabeled;  // V -> W relabelings during this step
  double v_mass;
  double w_mass;
  double x_mass;
  double a_dot;  // immigration rate sum_V mass * f_R(x)
  double support_min;
  double support_max;
};

struct LabeledTrajectory {
  std::vector<LabeledPoint> points;
  ParticlePopulation final_pop;
  double R = 0.0;
};

// Immigration rate V(f_R) = sum over V-labeled particles of mass * f_R(x);
// throws std::logic_error when a V-labeled particle sits outside (-R, R).
double immigration_rate(const ParticlePopulation& pop, double R,
                        const StableLaw& law);

// Observer invoked after every recorded step; return false to stop early.
using CoupledObserver =
    std::function<bool(const ParticlePopulation&, const LabeledPoint&)>;

// Free-motion critical branching with V/W lineage labeling at radius R.
// Requires supp(X0) within the closed ball of radius R/2 (GateError).
LabeledTrajectory coupled_simulate(const ParticlePopulation& x0,
                                   const StableLaw& law, double R, double T,
                                   double dt, RngStream& rng,
                                   std::size_t max_particles = 5'000'000,
                                   const CoupledObserver& observer = nullptr);

// Maximal recorded-time intervals with W-count = 0 and X-count > 0; on
// these the whole support sits inside the closed ball of radius R.
std::vector<std::pair<double, double>> detect_support_collapse(
    const LabeledTrajectory& traj);

struct IncrementMomentRow {
  double s;
  double moment4;        // mean over replicas of (A'(t0+s) - A'(t0))^4
  double stderr_batch;   // batch-mean standard error
};

struct IncrementScan {
  std::vector<IncrementMomentRow> rows;
  double slope;       // log-log OLS slope of moment4 vs s
  double slope_lo95;  // t-interval over per-batch slopes
  double slope_hi95;
  int n_batches;
};

// Fourth-moment scaling of immigration-rate increments at lag s; replicas
// are split into batches, a log-log slope is fit per batch, and the 95%
// interval uses the Student t quantile over batches.  Gate: alpha < 2/3.
IncrementScan increment_moment_scan(const StableLaw& law, double R,
                                    const std::vector<Atom>& x0, int N,
                                    double dt, double t0,
                                    const std::vector<double>& s_values,
                                    int n_replicas, std::uint64_t seed,
                                    int n_batches = 10);

struct ComparisonRun {
  double dt;
  double delta;
  std::vector<double> a_dot;  // per-step drift input
  std::vector<double> w;      // Euler path of dW = a_dot dt + sqrt(W+) dB
  std::vector<double> z;      // Euler path of dZ = delta dt + sqrt(Z+) dB
  long tau_index;             // first step with a_dot >= delta (or n_steps)
  double max_violation_before_tau;  // max over k < tau_index of (w - z)^+
  long first_violation_index;       // -1 when none
};

// Shared-noise Euler comparison of the immigrated-mass diffusion W(1)
// against the delta-drift dominating diffusion; noise[k] must be N(0, dt)
// increments.  Both diffusions start from the common level w0.
ComparisonRun sde_comparison(const std::vector<double>& a_dot_path,
                             double delta, double dt,
                             const std::vector<double>& noise,
                             double w0 = 0.0);

// Convenience overload drawing the noise from a fresh stream.
ComparisonRun sde_comparison(const std::vector<double>& a_dot_path,
                             double delta, double dt, std::uint64_t seed,
                             double w0 = 0.0);

}  // namespace ssp
