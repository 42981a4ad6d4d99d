#include "ssp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "ssp/decomposition.hpp"
#include "ssp/rng.hpp"

namespace ssp {

double ring_indicator(double x, double y, double r) {
  const double quarter = 0.25 * r;
  const double d = std::abs(x - y);
  return std::clamp((d - quarter) / quarter, 0.0, 1.0);
}

TauDetector::TauDetector(double epsilon, double r, double lattice_half_width)
    : epsilon_(epsilon), r_(r), half_width_(lattice_half_width) {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw GateError("TauDetector: epsilon in (0, 1/4)");
  if (!(r > 0.0)) throw GateError("TauDetector: r > 0");
  if (!(lattice_half_width >= r))
    throw GateError("TauDetector: lattice narrower than the probe scale");
}

bool TauDetector::check(const ParticlePopulation& pop) {
  if (triggered_) return true;
  const double mass = pop.total_mass();
  if (!(mass > 0.0) || mass > epsilon_) return false;
  const double eps3 = epsilon_ * epsilon_ * epsilon_;

  double lo = pop.particles.front().x, hi = lo;
  for (const Particle& q : pop.particles) {
    lo = std::min(lo, q.x);
    hi = std::max(hi, q.x);
  }
  // When the population spread exceeds r, every center is at probe distance
  // >= r/2 from one of the extremes, so the probe average is at least one
  // particle's share; skip the lattice scan when that already disqualifies.
  if (hi - lo > r_ && pop.mass_unit / mass > eps3) return false;

  const double pitch = 0.25 * r_;
  std::vector<long> cand;
  cand.reserve(pop.particles.size() * 5);
  for (const Particle& q : pop.particles) {
    // only centers within r/2 of some particle can score below 1
    const long k0 = std::llround(q.x / pitch);
    for (long k = k0 - 2; k <= k0 + 2; ++k)
      if (std::abs(static_cast<double>(k)) * pitch <= half_width_)
        cand.push_back(k);
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  for (long k : cand) {
    const double y = static_cast<double>(k) * pitch;
    double probe = 0.0;
    for (const Particle& q : pop.particles)
      probe += ring_indicator(q.x, y, r_);
    if (probe * pop.mass_unit <= eps3 * mass) {
      triggered_ = true;  // candidates are sorted, so this is the smallest k
      tau_time_ = pop.time;
      center_index_ = k;
      center_x_ = y;
      mu_mass_ = mass;
      return true;
    }
  }
  return false;
}

PopulationTail::PopulationTail(int keep, long detail_cap)
    : keep_(keep), detail_cap_(detail_cap) {
  if (keep < 1) throw ConfigError("PopulationTail: keep >= 1");
}

void PopulationTail::observe(const ParticlePopulation& pop) {
  if (pop.particles.empty()) return;
  Snapshot s;
  s.time = pop.time;
  s.mass = pop.total_mass();
  double fm = 0.0;
  for (const Particle& q : pop.particles) fm += q.x;
  s.first_moment = fm * pop.mass_unit;
  if (pop.count() <= detail_cap_) {
    s.xs.reserve(pop.particles.size());
    for (const Particle& q : pop.particles) s.xs.push_back(q.x);
  }
  if (static_cast<int>(snaps_.size()) == keep_) snaps_.erase(snaps_.begin());
  snaps_.push_back(std::move(s));
}

SupportEstimate estimate_F(const PopulationTail& tail) {
  if (tail.empty()) throw ConfigError("estimate_F: no populations observed");
  double fm = 0.0, m = 0.0;
  for (const PopulationTail::Snapshot& s : tail.snapshots()) {
    fm += s.first_moment;
    m += s.mass;
  }
  return {fm / m, tail.snapshots().back().time,
          static_cast<int>(tail.snapshots().size())};
}

double concentration_within(const PopulationTail& tail, double center,
                            double radius) {
  if (tail.empty()) return std::numeric_limits<double>::quiet_NaN();
  const PopulationTail::Snapshot& last = tail.snapshots().back();
  if (last.xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  long within = 0;
  for (double x : last.xs)
    if (std::abs(x - center) <= radius) ++within;
  return static_cast<double>(within) / static_cast<double>(last.xs.size());
}

namespace {

double binom_se(double freq, double n) {
  return n > 0.0 ? std::sqrt(freq * (1.0 - freq) / n) : 0.0;
}

}  // namespace

void Theorem11Config::validate() const {
  if (!(law.alpha > 0.0 && law.alpha < 2.0 / 3.0))
    throw GateError("theorem11: alpha in (0, 2/3)");
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw GateError("theorem11: epsilon in (0, 1/4)");
  if (!(inner_radius > 0.0)) throw GateError("theorem11: K > 0");
  if (!(decomposition_radius > 2.0 * inner_radius + 1.0))
    throw GateError("theorem11: need R > 2K + 1");
  if (initial.empty()) throw ConfigError("theorem11: initial measure empty");
  if (!(dt > 0.0) || particles_per_unit < 1 || n_replicas < 1)
    throw GateError("theorem11: dt > 0, N >= 1, replicas >= 1");
}

Theorem11Summary run_theorem11(const Theorem11Config& cfg) {
  cfg.validate();
  const double eps = cfg.epsilon;
  const double eps2 = eps * eps;

  Theorem11Summary out;
  out.epsilon = eps;
  out.n_replicas = cfg.n_replicas;

  const ParticlePopulation base =
      make_population(cfg.initial, static_cast<int>(cfg.particles_per_unit));
  ParticlePopulation inside, outside;
  split_initial(base, cfg.inner_radius, inside, outside);

  long n_gate = 0, n_det = 0;
  for (int rep = 0; rep < cfg.n_replicas; ++rep) {
    Theorem11Replica row{};
    row.first_detect_time = std::numeric_limits<double>::quiet_NaN();

    if (outside.count() == 0) {
      row.outer_dead_early = true;
    } else {
      RngStream rng_out(cfg.seed, 2ULL * static_cast<std::uint64_t>(rep));
      const MassPath mp = simulate_population_mass(
          outside.total_mass(), static_cast<int>(cfg.particles_per_unit),
          eps2, cfg.dt, rng_out);
      row.outer_dead_early = mp.extinct;
    }

    RngStream rng_in(cfg.seed, 2ULL * static_cast<std::uint64_t>(rep) + 1ULL);
    const LabeledTrajectory traj = coupled_simulate(
        inside, cfg.law, cfg.decomposition_radius, eps, cfg.dt, rng_in,
        static_cast<std::size_t>(cfg.max_particles));
    row.inner_alive_late = traj.final_pop.count() > 0;

    for (const LabeledPoint& pt : traj.points) {
      if (pt.time > eps2 && pt.time < eps && pt.w_count == 0 &&
          pt.v_count > 0) {
        if (row.n_detect_times == 0) row.first_detect_time = pt.time;
        ++row.n_detect_times;
        out.pooled_detect_times.push_back(pt.time);
      }
    }
    row.detected = row.n_detect_times > 0;
    row.gate_joint = row.outer_dead_early && row.inner_alive_late;
    if (row.gate_joint) ++n_gate;
    if (row.detected) ++n_det;
    out.replicas.push_back(row);
  }

  const double n = static_cast<double>(cfg.n_replicas);
  out.gate_freq = static_cast<double>(n_gate) / n;
  out.gate_se = binom_se(out.gate_freq, n);
  out.q = static_cast<double>(n_det) / n;
  out.q_se = binom_se(out.q, n);
  return out;
}

void Theorem12Config::validate() const {
  if (!(law.alpha > 0.0 && law.alpha < 2.0 / 3.0))
    throw GateError("theorem12: alpha in (0, 2/3)");
  if (epsilons.empty()) throw ConfigError("theorem12: no epsilon values");
  for (double e : epsilons)
    if (!(e > 0.0 && e < 0.25))
      throw GateError("theorem12: epsilon in (0, 1/4)");
  if (!(r > 0.0)) throw GateError("theorem12: r > 0");
  if (!(lattice_half_width >= r))
    throw GateError("theorem12: lattice narrower than the probe scale");
  if (initial.empty()) throw ConfigError("theorem12: initial measure empty");
  if (!(dt > 0.0) || !(t_max > 0.0) || particles_per_unit < 1 ||
      n_replicas < 1)
    throw GateError("theorem12: dt > 0, t_max > 0, N >= 1, replicas >= 1");
  if (window_start_points < 2)
    throw GateError("theorem12: need >= 2 grid points before the window");
  if (!(followup_horizon_factor > 0.0))
    throw GateError("theorem12: follow-up horizon factor > 0");
}

Theorem12Result run_theorem12(const Theorem12Config& cfg) {
  cfg.validate();
  const std::size_t E = cfg.epsilons.size();
  const int N = static_cast<int>(cfg.particles_per_unit);

  Theorem12Result res;
  res.n_replicas = cfg.n_replicas;
  res.n_phase1_unresolved = 0;
  res.per_epsilon.resize(E);
  for (std::size_t e = 0; e < E; ++e)
    res.per_epsilon[e].epsilon = cfg.epsilons[e];

  const ParticlePopulation base = make_population(cfg.initial, N);
  const long steps =
      static_cast<long>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
  EvolveOptions free_opts;
  free_opts.max_particles = static_cast<std::size_t>(cfg.max_particles);

  for (int rep = 0; rep < cfg.n_replicas; ++rep) {
    const std::uint64_t rep_block = 1024ULL * static_cast<std::uint64_t>(rep);

    // Phase 1: free run shared by every epsilon, one detector each.
    std::vector<TauDetector> dets;
    dets.reserve(E);
    for (double e : cfg.epsilons)
      dets.emplace_back(e, cfg.r, cfg.lattice_half_width);
    std::vector<ParticlePopulation> snaps(E);
    std::size_t remaining = E;
    {
      RngStream rng(cfg.seed, rep_block);
      ParticlePopulation pop = base;
      for (long k = 1; k <= steps && remaining > 0 && !pop.particles.empty();
           ++k) {
        evolve_population(pop, cfg.law, cfg.dt, rng, free_opts);
        pop.time = static_cast<double>(k) * cfg.dt;
        for (std::size_t e = 0; e < E; ++e) {
          if (dets[e].triggered()) continue;
          if (dets[e].check(pop)) {
            snaps[e] = pop;
            --remaining;
          }
        }
      }
    }
    if (remaining > 0) ++res.n_phase1_unresolved;

    // Phase 2 per epsilon: recenter, split at r/2, run the decomposition
    // through the mass-scaled window, then follow the clump to extinction.
    for (std::size_t e = 0; e < E; ++e) {
      Theorem12Summary& S = res.per_epsilon[e];
      Theorem12Replica row{};
      if (!dets[e].triggered()) {
        S.replicas.push_back(row);
        continue;
      }
      const double eps = cfg.epsilons[e];
      row.tau_found = true;
      row.tau_time = dets[e].tau_time();
      row.center_x = dets[e].center_x();
      row.mu_mass = dets[e].mu_mass();
      const double mu = row.mu_mass;
      const double window_lo = eps * eps * mu;
      const double window_hi = eps * mu;

      ParticlePopulation inner, outer;
      inner.mass_unit = outer.mass_unit = snaps[e].mass_unit;
      for (Particle q : snaps[e].particles) {
        q.x -= row.center_x;
        q.label = label_V;
        (std::abs(q.x) < 0.5 * cfg.r ? inner : outer).particles.push_back(q);
      }
      row.outer_empty = outer.particles.empty();
      row.inner_majority = inner.total_mass() >= 0.5 * mu * (1.0 - 1e-12);

      const double dt2 = window_lo / cfg.window_start_points;
      bool outer_dead = row.outer_empty;
      if (!row.outer_empty) {
        RngStream rng_o(cfg.seed, rep_block + 2 + 3 * e);
        const MassPath mp = simulate_population_mass(
            outer.total_mass(), N, window_lo, dt2, rng_o);
        outer_dead = mp.extinct;
      }

      PopulationTail tail;
      std::vector<std::pair<double, double>> det_supports;
      if (!inner.particles.empty()) {
        RngStream rng_a(cfg.seed, rep_block + 1 + 3 * e);
        const CoupledObserver watch_tail =
            [&tail](const ParticlePopulation& p, const LabeledPoint&) {
              tail.observe(p);
              return true;
            };
        const LabeledTrajectory traj =
            coupled_simulate(inner, cfg.law, cfg.r, window_hi, dt2, rng_a,
                             static_cast<std::size_t>(cfg.max_particles),
                             watch_tail);
        for (const LabeledPoint& pt : traj.points) {
          if (pt.time > window_lo && pt.time < window_hi && pt.w_count == 0 &&
              pt.v_count > 0) {
            if (row.n_detect_times == 0) row.first_detect_time = pt.time;
            ++row.n_detect_times;
            S.pooled_detect_times.push_back(pt.time);
            det_supports.push_back({pt.support_min, pt.support_max});
          }
        }
        row.detected = row.n_detect_times > 0;
        row.window_gate = outer_dead && traj.final_pop.count() > 0;

        // follow-up: labels no longer matter, run the free system until the
        // particles are gone (or the horizon cap trips)
        ParticlePopulation pop_b = traj.final_pop;
        if (pop_b.particles.empty()) {
          row.extinction_resolved = true;
        } else {
          pop_b.time = 0.0;
          const double dt3 =
              std::min(std::max(dt2, mu / 50.0), 0.5 / static_cast<double>(N));
          const long steps_b = static_cast<long>(
              std::ceil(cfg.followup_horizon_factor * mu / dt3 - 1e-9));
          RngStream rng_b(cfg.seed, rep_block + 3 + 3 * e);
          for (long k = 1; k <= steps_b && !pop_b.particles.empty(); ++k) {
            evolve_population(pop_b, cfg.law, dt3, rng_b, free_opts);
            pop_b.time = static_cast<double>(k) * dt3;
            tail.observe(pop_b);
          }
          row.extinction_resolved = pop_b.particles.empty();
        }

        if (!tail.empty()) row.f_hat = estimate_F(tail).f_hat;
        if (row.detected && row.extinction_resolved &&
            std::isfinite(row.f_hat)) {
          row.support_confined = true;
          for (const auto& [smin, smax] : det_supports) {
            if (smin < row.f_hat - 3.0 * cfg.r || smax > row.f_hat + 3.0 * cfg.r)
              row.support_confined = false;
          }
        }
      }
      S.replicas.push_back(row);
    }
  }

  for (Theorem12Summary& S : res.per_epsilon) {
    long n_trig = 0, n_gate = 0, n_det = 0, n_conf = 0, n_conf_den = 0;
    for (const Theorem12Replica& row : S.replicas) {
      if (!row.tau_found) continue;
      ++n_trig;
      if (row.window_gate) ++n_gate;
      if (row.detected) ++n_det;
      if (row.detected && row.extinction_resolved) {
        ++n_conf_den;
        if (row.support_confined) ++n_conf;
      }
    }
    S.n_triggered = static_cast<int>(n_trig);
    const double n = static_cast<double>(n_trig);
    S.gate_freq = n_trig > 0 ? static_cast<double>(n_gate) / n : 0.0;
    S.gate_se = binom_se(S.gate_freq, n);
    S.q = n_trig > 0 ? static_cast<double>(n_det) / n : 0.0;
    S.q_se = binom_se(S.q, n);
    S.confined_frac =
        n_conf_den > 0
            ? static_cast<double>(n_conf) / static_cast<double>(n_conf_den)
            : 0.0;
  }
  return res;
}

DimensionEstimate dimension_of_detected_set(const std::vector<double>& times,
                                            double window_lo, double window_hi,
                                            const std::vector<double>& scales) {
  if (scales.size() < 4)
    throw GateError("dimension_of_detected_set: need >= 4 scales");
  const auto [mn, mx] = std::minmax_element(scales.begin(), scales.end());
  if (*mx / *mn < 100.0)
    throw GateError("dimension_of_detected_set: scales must span >= 2 decades");
  if (!(window_hi > window_lo))
    throw GateError("dimension_of_detected_set: empty window");

  std::vector<double> ts;
  for (double t : times)
    if (t >= window_lo && t <= window_hi) ts.push_back(t);
  std::sort(ts.begin(), ts.end());

  DimensionEstimate est;
  est.scales = scales;
  std::sort(est.scales.begin(), est.scales.end());
  std::vector<double> logs_x, logs_y;
  for (double e : est.scales) {
    long count = 0;
    long last_box = -1;
    for (double t : ts) {
      const long box = static_cast<long>((t - window_lo) / e);
      if (box != last_box) {
        ++count;
        last_box = box;
      }
    }
    est.counts.push_back(count);
    if (count > 0) {
      logs_x.push_back(std::log(1.0 / e));
      logs_y.push_back(std::log(static_cast<double>(count)));
    }
  }
  long occupied_scales = 0;
  for (long c : est.counts)
    if (c >= 4) ++occupied_scales;
  est.unreliable = ts.empty() || occupied_scales < 4;
  if (logs_x.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(logs_x.size());
    for (std::size_t i = 0; i < logs_x.size(); ++i) {
      sx += logs_x[i];
      sy += logs_y[i];
      sxx += logs_x[i] * logs_x[i];
      sxy += logs_x[i] * logs_y[i];
    }
    est.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return est;
}

}  // namespace ssp
