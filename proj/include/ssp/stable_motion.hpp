#pragma once

#include <cstdint>
#include <vector>

#include "ssp/rng.hpp"
#include "ssp/stable_law.hpp"

namespace ssp {

// Exact increment of the standard symmetric alpha-stable process over dt
// (Chambers-Mallows-Stuck polar construction, beta = 0).
double sample_increment(const StableLaw& law, double dt, RngStream& rng);

// unit-time standardized variate
double sample_standard(const StableLaw& law, RngStream& rng);

// Landing point of the exit jump from x in B_R = (-R,R): density
// c_alpha |y-x|^{-1-alpha} / f_R(x) on |y| >= R (Pareto inverse CDF per side).
double sample_exit_jump(const StableLaw& law, double x, double R,
                        RngStream& rng);

// probability the exit jump from x lands right of +R
double exit_right_probability(double alpha, double x, double R);

struct KilledPath {
  std::vector<double> times;
  std::vector<double> positions;  // recorded while alive, including x0
  bool exited = false;
  double exit_time = 0.0;  // first grid time outside (-R,R), if exited
};

// Grid skeleton with exact increments, killed at the first grid point
// outside (-R,R).
KilledPath sample_killed_path(const StableLaw& law, double x0, double R,
                              double T, double dt, RngStream& rng);

// Endpoint-only variant for tight Monte Carlo loops: returns final position,
// sets `alive` false if the path left (-R,R) at some grid time <= T.
double killed_endpoint(const StableLaw& law, double x0, double R, double T,
                       double dt, RngStream& rng, bool& alive);

// r^alpha * P(sup_{[0,1]} Y >= r) for each r (running supremum over the grid)
std::vector<double> sup_tail(const StableLaw& law,
                             const std::vector<double>& rs, int n_paths,
                             double dt, std::uint64_t seed);

}  // namespace ssp
