#include "ssp/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "ssp/dirichlet_kernel.hpp"
#include "ssp/stable_motion.hpp"

namespace ssp {

double immigration_rate(const ParticlePopulation& pop, double R,
                        const StableLaw& law) {
  double acc = 0.0;
  for (const Particle& q : pop.particles) {
    if (q.label != label_V) continue;
    if (!(std::abs(q.x) < R))
      throw std::logic_error("immigration_rate: V particle outside (-R, R)");
    acc += boundary_flux(law, R, q.x);
  }
  return acc * pop.mass_unit;
}

namespace {

LabeledPoint record_point(const ParticlePopulation& pop, double R,
                          const StableLaw& law, long relabeled) {
  LabeledPoint pt{};
  pt.time = pop.time;
  pt.relabeled = relabeled;
  pt.support_min = std::numeric_limits<double>::infinity();
  pt.support_max = -std::numeric_limits<double>::infinity();
  double a_dot = 0.0;
  for (const Particle& q : pop.particles) {
    if (q.label == label_V) {
      ++pt.v_count;
      a_dot += boundary_flux(law, R, q.x);
    } else {
      ++pt.w_count;
    }
    pt.support_min = std::min(pt.support_min, q.x);
    pt.support_max = std::max(pt.support_max, q.x);
  }
  pt.v_mass = pt.v_count * pop.mass_unit;
  pt.w_mass = pt.w_count * pop.mass_unit;
  pt.x_mass = pt.v_mass + pt.w_mass;
  pt.a_dot = a_dot * pop.mass_unit;
  return pt;
}

}  // namespace

LabeledTrajectory coupled_simulate(const ParticlePopulation& x0,
                                   const StableLaw& law, double R, double T,
                                   double dt, RngStream& rng,
                                   std::size_t max_particles,
                                   const CoupledObserver& observer) {
  if (!(R > 0.0)) throw GateError("coupled_simulate: R > 0");
  if (!(dt > 0.0)) throw GateError("coupled_simulate: dt > 0");
  for (const Particle& q : x0.particles)
    if (std::abs(q.x) > 0.5 * R)
      throw GateError("coupled_simulate: supp(X0) must lie in B(0, R/2)");
  const double N = 1.0 / x0.mass_unit;
  const double p = 0.5 * N * dt;
  if (!(p <= 0.25)) throw GateError("coupled_simulate: need N*dt <= 0.5");

  LabeledTrajectory traj;
  traj.R = R;
  ParticlePopulation pop = x0;
  for (Particle& q : pop.particles)
    if (std::abs(q.x) >= R) q.label = label_W;  // defensive; gate above
  traj.points.push_back(record_point(pop, R, law, 0));
  if (observer && !observer(pop, traj.points.back())) {
    traj.final_pop = std::move(pop);
    return traj;
  }

  const long steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  std::vector<Particle> next;
  for (long k = 1; k <= steps && !pop.particles.empty(); ++k) {
    long relabeled = 0;
    next.clear();
    next.reserve(pop.particles.size() + pop.particles.size() / 8 + 16);
    for (Particle q : pop.particles) {
      q.x += sample_increment(law, dt, rng);
      if (q.label == label_V && std::abs(q.x) >= R) {
        q.label = label_W;
        ++relabeled;
      }
      const double u = rng.u01();
      if (u < p) continue;  // death
      next.push_back(q);
      if (u >= 1.0 - p) next.push_back(q);  // split, label inherited
    }
    if (next.size() > max_particles)
      throw CapExceeded("coupled_simulate: particle cap exceeded");
    pop.particles.swap(next);
    pop.time = k * dt;
    traj.points.push_back(record_point(pop, R, law, relabeled));
    if (observer && !observer(pop, traj.points.back())) break;
  }
  traj.final_pop = std::move(pop);
  return traj;
}

std::vector<std::pair<double, double>> detect_support_collapse(
    const LabeledTrajectory& traj) {
  std::vector<std::pair<double, double>> out;
  long start = -1;
  for (size_t i = 0; i < traj.points.size(); ++i) {
    const LabeledPoint& pt = traj.points[i];
    const bool collapsed = pt.w_count == 0 && pt.v_count > 0;
    if (collapsed && start < 0) start = static_cast<long>(i);
    if (!collapsed && start >= 0) {
      out.push_back({traj.points[start].time, traj.points[i - 1].time});
      start = -1;
    }
  }
  if (start >= 0)
    out.push_back({traj.points[start].time, traj.points.back().time});
  return out;
}

IncrementScan increment_moment_scan(const StableLaw& law, double R,
                                    const std::vector<Atom>& x0, int N,
                                    double dt, double t0,
                                    const std::vector<double>& s_values,
                                    int n_replicas, std::uint64_t seed,
                                    int n_batches) {
  if (!(law.alpha < 2.0 / 3.0))
    throw GateError("increment_moment_scan: alpha < 2/3 required");
  if (s_values.empty() || n_replicas < n_batches || n_batches < 2)
    throw GateError("increment_moment_scan: bad sizes");
  const double s_max = *std::max_element(s_values.begin(), s_values.end());
  const double T = t0 + s_max;

  // per-replica fourth powers of the lag-s increments
  const size_t S = s_values.size();
  std::vector<std::vector<double>> pow4(S);
  for (auto& v : pow4) v.reserve(n_replicas);
  const ParticlePopulation base = make_population(x0, N);
  for (int r = 0; r < n_replicas; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    double a0 = 0.0;
    std::vector<double> as(S, 0.0);
    auto observer = [&](const ParticlePopulation&, const LabeledPoint& pt) {
      if (std::abs(pt.time - t0) < 0.5 * dt) a0 = pt.a_dot;
      for (size_t i = 0; i < S; ++i)
        if (std::abs(pt.time - (t0 + s_values[i])) < 0.5 * dt)
          as[i] = pt.a_dot;
      return true;
    };
    coupled_simulate(base, law, R, T, dt, rng, 5'000'000, observer);
    for (size_t i = 0; i < S; ++i) {
      const double d = as[i] - a0;
      pow4[i].push_back(d * d * d * d);
    }
  }

  IncrementScan out;
  out.n_batches = n_batches;
  std::vector<double> mean(S, 0.0);
  for (size_t i = 0; i < S; ++i) {
    for (double v : pow4[i]) mean[i] += v;
    mean[i] /= n_replicas;
  }
  // per-batch log-log slopes
  std::vector<double> slopes;
  const int per_batch = n_replicas / n_batches;
  for (int b = 0; b < n_batches; ++b) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < S; ++i) {
      double m = 0.0;
      for (int r = b * per_batch; r < (b + 1) * per_batch; ++r)
        m += pow4[i][r];
      m /= per_batch;
      const double lx = std::log(s_values[i]);
      const double ly = std::log(std::max(m, 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double n = static_cast<double>(S);
    slopes.push_back((n * sxy - sx * sy) / (n * sxx - sx * sx));
  }
  double sm = 0.0;
  for (double v : slopes) sm += v;
  sm /= n_batches;
  double sv = 0.0;
  for (double v : slopes) sv += (v - sm) * (v - sm);
  sv /= (n_batches - 1);
  const boost::math::students_t tdist(n_batches - 1);
  const double tq = boost::math::quantile(tdist, 0.975);
  const double half = tq * std::sqrt(sv / n_batches);
  out.slope = sm;
  out.slope_lo95 = sm - half;
  out.slope_hi95 = sm + half;

  for (size_t i = 0; i < S; ++i) {
    // batch-mean standard error for the per-s moment
    std::vector<double> bm(n_batches, 0.0);
    for (int b = 0; b < n_batches; ++b) {
      for (int r = b * per_batch; r < (b + 1) * per_batch; ++r)
        bm[b] += pow4[i][r];
      bm[b] /= per_batch;
    }
    double m = 0.0;
    for (double v : bm) m += v;
    m /= n_batches;
    double var = 0.0;
    for (double v : bm) var += (v - m) * (v - m);
    var /= (n_batches - 1);
    out.rows.push_back({s_values[i], mean[i], std::sqrt(var / n_batches)});
  }
  return out;
}

ComparisonRun sde_comparison(const std::vector<double>& a_dot_path,
                             double delta, double dt,
                             const std::vector<double>& noise, double w0) {
  if (!(w0 >= 0.0)) throw GateError("sde_comparison: w0 >= 0");
  if (!(delta > 0.0 && delta < 0.25))
    throw GateError("sde_comparison: delta in (0, 1/4)");
  if (!(dt > 0.0)) throw GateError("sde_comparison: dt > 0");
  if (noise.size() < a_dot_path.size())
    throw GateError("sde_comparison: noise shorter than drift path");
  for (double a : a_dot_path)
    if (a < 0.0) throw GateError("sde_comparison: a_dot must be nonnegative");

  ComparisonRun run;
  run.dt = dt;
  run.delta = delta;
  run.a_dot = a_dot_path;
  const size_t n = a_dot_path.size();
  run.tau_index = static_cast<long>(n);
  for (size_t k = 0; k < n; ++k)
    if (a_dot_path[k] >= delta) {
      run.tau_index = static_cast<long>(k);
      break;
    }
  run.w.assign(n + 1, w0);
  run.z.assign(n + 1, w0);
  run.first_violation_index = -1;
  run.max_violation_before_tau = 0.0;
  for (size_t k = 0; k < n; ++k) {
    const double g = noise[k];
    run.w[k + 1] =
        std::max(0.0, run.w[k] + a_dot_path[k] * dt + std::sqrt(run.w[k]) * g);
    run.z[k + 1] =
        std::max(0.0, run.z[k] + delta * dt + std::sqrt(run.z[k]) * g);
    if (static_cast<long>(k + 1) <= run.tau_index) {
      const double viol = run.w[k + 1] - run.z[k + 1];
      if (viol > run.max_violation_before_tau)
        run.max_violation_before_tau = viol;
      if (viol > 0.0 && run.first_violation_index < 0)
        run.first_violation_index = static_cast<long>(k + 1);
    }
  }
  return run;
}

ComparisonRun sde_comparison(const std::vector<double>& a_dot_path,
                             double delta, double dt, std::uint64_t seed,
                             double w0) {
  RngStream rng(seed, 0);
  std::vector<double> noise(a_dot_path.size());
  const double sdt = std::sqrt(dt);
  for (double& g : noise) g = sdt * rng.normal();
  return sde_comparison(a_dot_path, delta, dt, noise, w0);
}

}  // namespace ssp
