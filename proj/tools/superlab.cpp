// superlab: simulation and verification laboratory for one-dimensional
// alpha-stable superprocesses.  Subcommands wire key=value configs to the
// library pipelines and emit CSV files plus a run manifest; reruns with the
// same resolved config are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssp/bessel.hpp"
#include "ssp/branching.hpp"
#include "ssp/config.hpp"
#include "ssp/csv.hpp"
#include "ssp/decomposition.hpp"
#include "ssp/dirichlet_kernel.hpp"
#include "ssp/experiments.hpp"
#include "ssp/moments.hpp"
#include "ssp/quadrature.hpp"
#include "ssp/stats.hpp"

namespace {

using namespace ssp;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  long replicas = -1;
  long long seed = -1;
  long threads = -1;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key=value config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--set", args.overrides,
                  "override KEY=VALUE (repeatable)");
  cmd->add_option("--replicas", args.replicas, "override replicas");
  cmd->add_option("--seed", args.seed, "override seed");
  cmd->add_option("--threads", args.threads,
                  "worker hint; results are scheduling-independent");
}

Config resolve_config(const CommonArgs& args) {
  Config cfg;
  if (!args.config_path.empty()) cfg = Config::from_file(args.config_path);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.replicas >= 0) cfg.set("replicas", std::to_string(args.replicas));
  if (args.seed >= 0) cfg.set("seed", std::to_string(args.seed));
  if (args.threads >= 0) cfg.set("threads", std::to_string(args.threads));
  return cfg;
}

std::string out_dir_or_default(const CommonArgs& args,
                               const std::string& command) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (const char* env = std::getenv("SUPERLAB_OUT"))
    return std::string(env) + "/" + command;
  return "out/" + command;
}

long threads_hint(const Config& cfg) {
  const long t = cfg.get_long("threads", 1);
  if (t < 1) throw ConfigError("threads must be >= 1");
  return t;  // replicas use counter-based streams; order never matters
}

void progress(const char* what, int done, int total) {
  if (total >= 20 && done % (total / 10) != 0 && done != total) return;
  std::fprintf(stderr, "[%s] %d/%d\n", what, done, total);
}

std::string atoms_to_string(const std::vector<Atom>& atoms) {
  std::string s;
  for (const Atom& a : atoms) {
    if (!s.empty()) s += ",";
    s += CsvWriter::fmt(a.x) + ":" + CsvWriter::fmt(a.mass);
  }
  return s;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonArgs& args) {
  Config cfg = resolve_config(args);
  cfg.require_known({"alpha", "mode", "initial", "particles_per_unit", "dt",
                     "t_max", "kill_radius", "record_points", "replicas",
                     "seed", "threads", "max_particles"});
  const std::string mode = cfg.get_string("mode", "count");
  if (mode != "count" && mode != "feller" && mode != "particles")
    throw ConfigError("mode must be count, feller or particles");
  const std::vector<Atom> initial = cfg.get_atoms("initial", {{0.0, 1.0}});
  const int N = static_cast<int>(cfg.get_long("particles_per_unit", 500));
  const double dt = cfg.get_double("dt", 1e-3);
  const double t_max = cfg.get_double("t_max", 2.0);
  const int record_points = static_cast<int>(cfg.get_long("record_points", 32));
  const int replicas = static_cast<int>(cfg.get_long("replicas", 1000));
  const std::uint64_t seed = cfg.get_long("seed", 1);
  const long max_particles = cfg.get_long("max_particles", 5'000'000);
  threads_hint(cfg);
  const StableLaw law(cfg.get_double("alpha", 0.5));
  double m0 = 0.0;
  for (const Atom& a : initial) m0 += a.mass;

  const std::string out = out_dir_or_default(args, "simulate");
  write_manifest(out, cfg, {{"replica_base", seed}});
  CsvWriter ext(out + "/extinction.csv",
                {"replica", "extinct", "extinction_time", "final_mass"});
  CsvWriter surv(out + "/survival.csv",
                 {"time", "surviving_fraction", "feller_survival"});

  std::vector<long> alive(record_points + 1, 0);
  for (int rep = 0; rep < replicas; ++rep) {
    RngStream rng(seed, static_cast<std::uint64_t>(rep));
    bool extinct = false;
    double ext_time = -1.0, final_mass = 0.0;
    std::function<double(double)> mass_at;
    MassPath mp;
    if (mode == "count" || mode == "feller") {
      mp = mode == "count"
               ? simulate_population_mass(m0, N, t_max, dt, rng, max_particles)
               : simulate_feller_mass(m0, t_max, dt, rng);
      extinct = mp.extinct;
      ext_time = mp.extinction_time;
      final_mass = mp.mass.back();
      mass_at = [&mp](double t) { return mp.mass_at(t); };
    } else {
      ParticlePopulation pop = make_population(initial, N);
      EvolveOptions opts;
      opts.max_particles = static_cast<std::size_t>(max_particles);
      if (cfg.has("kill_radius"))
        opts.kill_radius = cfg.get_double("kill_radius");
      const long steps = std::lround(t_max / dt);
      std::vector<double> masses;
      masses.reserve(steps + 1);
      masses.push_back(pop.total_mass());
      for (long k = 1; k <= steps; ++k) {
        evolve_population(pop, law, dt, rng, opts);
        masses.push_back(pop.total_mass());
        if (pop.particles.empty()) {
          extinct = true;
          ext_time = k * dt;
          break;
        }
      }
      final_mass = masses.back();
      mass_at = [&masses, dt](double t) {
        const long k = std::min<long>(std::lround(std::floor(t / dt)),
                                      static_cast<long>(masses.size()) - 1);
        return masses[std::max<long>(k, 0)];
      };
    }
    for (int j = 0; j <= record_points; ++j) {
      const double t = t_max * j / record_points;
      if (mass_at(t) > 0.0) ++alive[j];
    }
    ext.row({static_cast<double>(rep), extinct ? 1.0 : 0.0, ext_time,
             final_mass});
    progress("simulate", rep + 1, replicas);
  }
  for (int j = 0; j <= record_points; ++j) {
    const double t = t_max * j / record_points;
    surv.row({t, static_cast<double>(alive[j]) / replicas,
              t > 0.0 ? extinction_probability_formula(m0, t) : 1.0});
  }
  return 0;
}

// ---------------------------------------------------------- verify-moments

int cmd_verify_moments(const CommonArgs& args) {
  Config cfg = resolve_config(args);
  cfg.require_known({"alpha", "phi", "s", "grid_half_width", "grid_points",
                     "time_panels", "n_max", "initial", "mc_replicas",
                     "particles_per_unit", "dt", "replicas", "seed",
                     "threads"});
  const StableLaw law(cfg.get_double("alpha", 1.0));
  const std::string phi_id = cfg.get_string("phi", "gauss");
  const double s = cfg.get_double("s", 0.5);
  const double L = cfg.get_double("grid_half_width", 30.0);
  const int G = static_cast<int>(cfg.get_long("grid_points", 241));
  const int panels = static_cast<int>(cfg.get_long("time_panels", 128));
  const int n_max = static_cast<int>(cfg.get_long("n_max", 4));
  const std::vector<Atom> mu = cfg.get_atoms("initial", {{0.0, 1.0}});
  const int mc_replicas =
      static_cast<int>(cfg.get_long("mc_replicas", cfg.get_long("replicas", 0)));
  const int N = static_cast<int>(cfg.get_long("particles_per_unit", 250));
  const double dt = cfg.get_double("dt", 2e-3);
  const std::uint64_t seed = cfg.get_long("seed", 9);
  threads_hint(cfg);
  if (n_max < 1 || n_max > 4) throw ConfigError("n_max must be 1..4");

  std::function<double(double)> phi;
  if (phi_id == "one")
    phi = [](double) { return 1.0; };
  else if (phi_id == "gauss")
    phi = [](double x) { return std::exp(-x * x); };
  else
    throw ConfigError("phi must be one or gauss");

  std::fprintf(stderr, "[verify-moments] recursion on %d-point grid\n", G);
  FullSpaceOracle oracle(law, L, G);
  VnTable tab = compute_vn(oracle, phi, s, n_max, panels);
  std::vector<double> rec = raw_moments_from_vn(tab, mu, oracle.grid(), n_max);

  double m0 = 0.0;
  for (const Atom& a : mu) m0 += a.mass;
  std::vector<double> ito(4, std::nan(""));
  if (phi_id == "one") {
    ito[0] = m0;
    ito[1] = m0 * m0 + m0 * s;
    ito[2] = m0 * m0 * m0 + 3.0 * m0 * m0 * s + 1.5 * m0 * s * s;
    ito[3] = m0 * m0 * m0 * m0 + 6.0 * m0 * m0 * m0 * s +
             9.0 * m0 * m0 * s * s + 3.0 * m0 * s * s * s;
  }

  std::vector<double> mc_mean(n_max, std::nan("")), mc_se(n_max, std::nan(""));
  if (mc_replicas > 0) {
    const long steps = std::lround(s / dt);
    std::vector<std::vector<double>> samples(n_max);
    for (int rep = 0; rep < mc_replicas; ++rep) {
      RngStream rng(seed, static_cast<std::uint64_t>(rep));
      ParticlePopulation pop = make_population(mu, N);
      for (long k = 0; k < steps; ++k) evolve_population(pop, law, dt, rng);
      double val = 0.0;
      for (const Particle& q : pop.particles) val += phi(q.x);
      val *= pop.mass_unit;
      double pw = 1.0;
      for (int n = 0; n < n_max; ++n) {
        pw *= val;
        samples[n].push_back(pw);
      }
      progress("verify-moments mc", rep + 1, mc_replicas);
    }
    for (int n = 0; n < n_max; ++n) {
      mc_mean[n] = mean(samples[n]);
      mc_se[n] = stderr_mean(samples[n]);
    }
  }

  const std::string out = out_dir_or_default(args, "verify-moments");
  write_manifest(out, cfg, {{"mc_replica_base", seed}});
  CsvWriter mom(out + "/moments.csv",
                {"order", "recursion_value", "ito_value", "mc_value",
                 "mc_stderr"});
  for (int n = 1; n <= n_max; ++n)
    mom.row({static_cast<double>(n), rec[n - 1], ito[n - 1], mc_mean[n - 1],
             mc_se[n - 1]});
  return 0;
}

// ---------------------------------------------------------- verify-kernels

int cmd_verify_kernels(const CommonArgs& args) {
  Config cfg = resolve_config(args);
  cfg.require_known({"alpha", "R", "gamma", "levels", "s_grid", "y_grid",
                     "gamma36", "rho", "t_grid", "y36_grid", "mc_paths",
                     "mc_steps", "s35_grid", "x35_grid", "flux_points",
                     "xi_grid", "x_eval", "replicas", "seed", "threads"});
  const StableLaw law(cfg.get_double("alpha", 0.5));
  const double a = law.alpha;
  const double R = cfg.get_double("R", 2.0);
  const double gamma = cfg.get_double("gamma", 0.5 * (1.0 / a + 0.5));
  const int levels = static_cast<int>(cfg.get_long("levels", 4));
  const std::vector<double> s_grid =
      cfg.get_double_list("s_grid", {0.05, 0.1, 0.2, 0.4});
  const std::vector<double> y_grid =
      cfg.get_double_list("y_grid", {0.0, 0.5, 1.0, 1.5, 1.9});
  const double gamma36 =
      cfg.get_double("gamma36", 0.5 * (1.0 / a - 0.5));
  const double rho =
      cfg.get_double("rho", 0.5 * std::min(1.0, 1.0 / a - gamma36));
  const std::vector<double> t_grid =
      cfg.get_double_list("t_grid", {0.1, 0.2, 0.4});
  const std::vector<double> y36_grid =
      cfg.get_double_list("y36_grid", {0.0, 1.0, 1.7});
  const int mc_paths = static_cast<int>(cfg.get_long("mc_paths", 4000));
  const int mc_steps = static_cast<int>(cfg.get_long("mc_steps", 50));
  const std::vector<double> s35 =
      cfg.get_double_list("s35_grid", {0.05, 0.1, 0.2});
  const std::vector<double> x35 =
      cfg.get_double_list("x35_grid", {0.0, 0.5, 1.0, 1.4});
  const int flux_points = static_cast<int>(cfg.get_long("flux_points", 100));
  const std::vector<double> xi_grid =
      cfg.get_double_list("xi_grid", {0.5, 1.0, 2.0});
  const double x_eval = cfg.get_double("x_eval", 0.4);
  const std::uint64_t seed = cfg.get_long("seed", 99);
  threads_hint(cfg);

  const std::string out = out_dir_or_default(args, "verify-kernels");
  write_manifest(out, cfg, {{"lemma35_paths", seed}});

  std::fprintf(stderr, "[verify-kernels] lemma bound traces\n");
  LemmaCheck l34 = check_lemma34(law, R, gamma, s_grid, y_grid, levels);
  LemmaCheck l36 =
      check_lemma36(law, R, gamma36, rho, t_grid, y36_grid,
                    std::max(2, levels - 1));
  Lemma35Result l35 =
      check_lemma35(law, R, s35, x35, mc_paths, mc_steps, seed);

  CsvWriter rep(out + "/bound_report.csv",
                {"lemma", "alpha", "R", "gamma", "rho", "level", "sup_ratio"});
  auto dump = [&rep](const std::vector<BoundReportRow>& rows) {
    for (const BoundReportRow& r : rows)
      rep.row_mixed({r.lemma_id, CsvWriter::fmt(r.alpha), CsvWriter::fmt(r.R),
                     CsvWriter::fmt(r.gamma), CsvWriter::fmt(r.rho),
                     std::to_string(r.refinement_level),
                     CsvWriter::fmt(r.sup_ratio)});
  };
  dump(l34.rows);
  dump(l36.rows);
  dump(l35.rows);

  CsvWriter summ(out + "/kernel_summary.csv",
                 {"lemma", "diverging", "noisy", "last_ratio"});
  summ.row_mixed({"3.4", std::to_string(int(l34.diverging)), "0",
                  CsvWriter::fmt(l34.trace.back())});
  summ.row_mixed({"3.6", std::to_string(int(l36.diverging)), "0",
                  CsvWriter::fmt(l36.trace.back())});
  summ.row_mixed({"3.5", "0", std::to_string(int(l35.noisy)),
                  CsvWriter::fmt(l35.fitted_constant.back())});

  std::fprintf(stderr, "[verify-kernels] boundary flux grid\n");
  CsvWriter flux(out + "/flux_check.csv",
                 {"x", "closed_form", "quadrature", "rel_err",
                  "envelope_ratio"});
  const double C = flux_bound_constant(law);
  for (int i = 0; i < flux_points; ++i) {
    const double x = -0.99 * R + (1.98 * R) * i / (flux_points - 1);
    const double f = boundary_flux(law, R, x);
    const double q = boundary_flux_quadrature(law, R, x);
    flux.row({x, f, q, std::abs(q - f) / std::abs(f),
              f / (C * std::pow(R - std::abs(x), -a))});
  }

  std::fprintf(stderr, "[verify-kernels] symbol check\n");
  CsvWriter sym(out + "/symbol_check.csv",
                {"xi", "applied", "target", "rel_err"});
  for (double xi : xi_grid) {
    auto f = [xi](double x) { return std::cos(xi * x); };
    const double got = apply_frac_laplacian(f, x_eval, law);
    const double want = -std::pow(std::abs(xi), a) * std::cos(xi * x_eval);
    sym.row({xi, got, want, std::abs(got - want) / std::abs(want)});
  }
  return 0;
}

// ------------------------------------------------------------------ bessel

int cmd_bessel(const CommonArgs& args) {
  Config cfg = resolve_config(args);
  cfg.require_known({"delta", "a", "b", "mc_paths", "mc_dt", "mc_mode",
                     "dim_paths", "dim_dt", "dim_t_max", "dim_window_lo",
                     "dim_window_hi", "dim_scales", "a_grid", "gap_grid",
                     "density_t", "replicas", "seed", "threads"});
  const double delta = cfg.get_double("delta", 0.1);
  const double a = cfg.get_double("a", 0.25);
  const double b = cfg.get_double("b", 0.5);
  const long mc_paths = cfg.get_long("mc_paths", 100000);
  const double mc_dt = cfg.get_double("mc_dt", 1e-5);
  const std::string mode_id = cfg.get_string("mc_mode", "bridge");
  const int dim_paths = static_cast<int>(cfg.get_long("dim_paths", 100));
  const double dim_dt = cfg.get_double("dim_dt", 1e-6);
  const double dim_t_max = cfg.get_double("dim_t_max", 1.0);
  const double win_lo = cfg.get_double("dim_window_lo", 0.25);
  const double win_hi = cfg.get_double("dim_window_hi", 1.0);
  const std::vector<double> scales = cfg.get_double_list(
      "dim_scales", {5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3, 5e-4});
  const std::vector<double> a_grid =
      cfg.get_double_list("a_grid", {0.1, 0.2, 0.4, 0.8});
  const std::vector<double> gap_grid =
      cfg.get_double_list("gap_grid", {0.05, 0.1, 0.2, 0.4});
  const double density_t = cfg.get_double("density_t", 1.0);
  const std::uint64_t seed = cfg.get_long("seed", 7);
  threads_hint(cfg);

  ZeroGapMcMode mode;
  if (mode_id == "naive")
    mode = ZeroGapMcMode::euler;
  else if (mode_id == "bridge")
    mode = ZeroGapMcMode::euler_bridge;
  else if (mode_id == "rb")
    mode = ZeroGapMcMode::exact_resample;
  else
    throw ConfigError("mc_mode must be naive, bridge or rb");

  const std::string out = out_dir_or_default(args, "bessel");
  write_manifest(out, cfg, {{"mc_path_base", seed}, {"dim_path_base", seed + 1}});

  std::fprintf(stderr, "[bessel] zero-gap triangle\n");
  const double nested =
      zero_gap_probability(a, b, delta, ZeroGapRoute::nested);
  const double reduced =
      zero_gap_probability(a, b, delta, ZeroGapRoute::reduced);
  ZeroGapMc mc = zero_gap_mc(delta, a, b, mc_paths, mc_dt, mode, seed);
  CsvWriter zg(out + "/zero_gap.csv",
               {"method", "no_zero_probability", "stderr", "n_paths"});
  zg.row_mixed({"nested", CsvWriter::fmt(nested), "0", "0"});
  zg.row_mixed({"reduced", CsvWriter::fmt(reduced), "0", "0"});
  zg.row_mixed({"mc_" + mode_id, CsvWriter::fmt(1.0 - mc.hit_fraction),
                CsvWriter::fmt(mc.se), std::to_string(mc.n_paths)});

  std::fprintf(stderr, "[bessel] zero-set dimension over %d paths\n",
               dim_paths);
  CsvWriter dim(out + "/dimension_paths.csv",
                {"replica", "slope", "unreliable"});
  std::vector<double> slopes;
  for (int r = 0; r < dim_paths; ++r) {
    RngStream rng(seed + 1, static_cast<std::uint64_t>(r));
    BesqPath path = simulate_besq(delta, dim_t_max, dim_dt, rng);
    DimensionEstimate est = box_dimension(path.zeros, win_lo, win_hi, scales);
    if (!est.unreliable) slopes.push_back(est.slope);
    dim.row({static_cast<double>(r), est.slope, est.unreliable ? 1.0 : 0.0});
    progress("bessel dim", r + 1, dim_paths);
  }

  std::fprintf(stderr, "[bessel] T0 constant bound grid\n");
  Lemma23Report l23 = lemma23_bound_check(delta, a_grid, gap_grid);
  CsvWriter l23csv(out + "/t0_bound.csv", {"a", "b", "ratio"});
  for (const Lemma23Row& r : l23.rows) l23csv.row({r.a, r.b, r.ratio});

  // Gamma(2 delta, 2 t) facts by quadrature.  The density has an integrable
  // y^{2 delta - 1} singularity at 0, so the normalization integral is taken
  // in the variable u = y^{2 delta}, where the integrand is smooth.
  const double d2 = 2.0 * delta;
  auto dens = [&](double y) { return besq_density(delta, density_t, y); };
  auto dens_u = [&](double u) {
    const double y = std::pow(u, 1.0 / d2);
    return dens(y) * std::pow(u, 1.0 / d2 - 1.0) / d2;
  };
  const double u_max = std::pow(200.0 * density_t, d2);
  std::vector<double> ubreaks{0.0};
  for (int j = 20; j >= 0; --j) ubreaks.push_back(u_max * std::ldexp(1.0, -j));
  const double norm = integrate_adaptive(dens_u, ubreaks, 1e-13, 1e-13);
  auto ydens = [&](double y) { return y * dens(y); };
  std::vector<double> breaks{0.0};
  for (double w = 2.0 * density_t * 1e-6; w < 400.0 * density_t; w *= 2.0)
    breaks.push_back(w);
  const double mean_q = integrate_adaptive(ydens, breaks, 1e-13, 1e-13);

  CsvWriter summ(out + "/bessel_summary.csv",
                 {"key", "value"});
  summ.row_mixed({"zero_gap_nested", CsvWriter::fmt(nested)});
  summ.row_mixed({"zero_gap_reduced", CsvWriter::fmt(reduced)});
  summ.row_mixed({"zero_gap_mc_hit", CsvWriter::fmt(mc.hit_fraction)});
  summ.row_mixed({"zero_gap_mc_se", CsvWriter::fmt(mc.se)});
  summ.row_mixed({"dim_mean_slope",
                  CsvWriter::fmt(slopes.empty() ? std::nan("") : mean(slopes))});
  summ.row_mixed({"dim_se",
                  CsvWriter::fmt(slopes.size() > 1 ? stderr_mean(slopes)
                                                   : std::nan(""))});
  summ.row_mixed({"dim_reliable", std::to_string(slopes.size())});
  summ.row_mixed({"t0_fitted", CsvWriter::fmt(l23.fitted)});
  summ.row_mixed({"t0_fitted_refined", CsvWriter::fmt(l23.fitted_refined)});
  summ.row_mixed({"t0_stable", std::to_string(int(l23.stable))});
  summ.row_mixed({"density_norm", CsvWriter::fmt(norm)});
  summ.row_mixed({"density_mean", CsvWriter::fmt(mean_q)});
  summ.row_mixed({"density_mean_target", CsvWriter::fmt(4.0 * delta * density_t)});
  return 0;
}

// --------------------------------------------------------------- decompose

int cmd_decompose(const CommonArgs& args) {
  Config cfg = resolve_config(args);
  cfg.require_known({"alpha", "R", "initial", "particles_per_unit", "dt",
                     "t_max", "ks_times", "replicas", "seed", "max_particles",
                     "comparison_replicas", "comparison_dts",
                     "comparison_delta", "comparison_ramp_time",
                     "comparison_horizon", "comparison_obs_dt",
                     "scan_replicas", "scan_t0", "scan_s_values",
                     "scan_batches", "scan_particles_per_unit", "scan_dt",
                     "threads"});
  const StableLaw law(cfg.get_double("alpha", 0.5));
  const double R = cfg.get_double("R", 4.0);
  const std::vector<Atom> initial = cfg.get_atoms("initial", {{0.0, 1.0}});
  const int N = static_cast<int>(cfg.get_long("particles_per_unit", 200));
  const double dt = cfg.get_double("dt", 1.25e-3);
  const double t_max = cfg.get_double("t_max", 1.0);
  const std::vector<double> ks_times =
      cfg.get_double_list("ks_times", {0.25, 0.5, 1.0});
  const int replicas = static_cast<int>(cfg.get_long("replicas", 600));
  const std::uint64_t seed = cfg.get_long("seed", 21);
  const long max_particles = cfg.get_long("max_particles", 5'000'000);
  threads_hint(cfg);

  const std::string out = out_dir_or_default(args, "decompose");
  write_manifest(out, cfg,
                 {{"coupled_base", seed}, {"comparison_base", seed + 1},
                  {"scan_base", seed + 2}});

  if (replicas > 0) {
    std::fprintf(stderr, "[decompose] coupled vs plain, %d replicas\n",
                 replicas);
    const long steps = std::lround(t_max / dt);
    std::vector<std::vector<double>> coup(ks_times.size()),
        plain(ks_times.size());
    std::vector<double> paired_diff;
    long ledger_violations = 0;
    CsvWriter collapse(out + "/collapse_intervals.csv",
                       {"replica", "t_start", "t_end"});
    for (int rep = 0; rep < replicas; ++rep) {
      RngStream rng(seed, 2ULL * rep);
      ParticlePopulation x0 = make_population(initial, N);
      LabeledTrajectory traj =
          coupled_simulate(x0, law, R, t_max, dt, rng, max_particles);
      double rel_mass = 0.0, imm = 0.0;
      for (const LabeledPoint& pt : traj.points) {
        rel_mass += pt.relabeled * traj.final_pop.mass_unit;
        imm += pt.a_dot * dt;
        if (pt.v_count + pt.w_count !=
            std::lround(pt.x_mass / traj.final_pop.mass_unit))
          ++ledger_violations;
        if (std::abs(pt.v_mass + pt.w_mass - pt.x_mass) != 0.0)
          ++ledger_violations;
      }
      paired_diff.push_back(rel_mass - imm);
      for (std::size_t i = 0; i < ks_times.size(); ++i) {
        const long k = std::lround(ks_times[i] / dt);
        coup[i].push_back(
            k >= 1 && k <= static_cast<long>(traj.points.size())
                ? traj.points[k - 1].x_mass
                : 0.0);
      }
      for (const auto& iv : detect_support_collapse(traj))
        collapse.row({static_cast<double>(rep), iv.first, iv.second});

      RngStream rng2(seed, 2ULL * rep + 1);
      ParticlePopulation pop = make_population(initial, N);
      std::vector<double> masses{pop.total_mass()};
      for (long k = 1; k <= steps; ++k) {
        evolve_population(pop, law, dt, rng2);
        masses.push_back(pop.total_mass());
        if (pop.particles.empty()) break;
      }
      for (std::size_t i = 0; i < ks_times.size(); ++i) {
        const long k = std::lround(ks_times[i] / dt);
        plain[i].push_back(k < static_cast<long>(masses.size()) ? masses[k]
                                                                : 0.0);
      }
      progress("decompose", rep + 1, replicas);
    }
    CsvWriter ks(out + "/mass_ks.csv",
                 {"t", "ks_statistic", "p_value", "n_each"});
    for (std::size_t i = 0; i < ks_times.size(); ++i) {
      KsResult r = ks_two_sample(coup[i], plain[i]);
      ks.row({ks_times[i], r.statistic, r.p_value,
              static_cast<double>(coup[i].size())});
    }
    CsvWriter fx(out + "/flux_summary.csv",
                 {"mean_paired_diff", "se_paired_diff", "ledger_violations",
                  "n"});
    fx.row({mean(paired_diff), stderr_mean(paired_diff),
            static_cast<double>(ledger_violations),
            static_cast<double>(replicas)});
  }

  const int comp_reps =
      static_cast<int>(cfg.get_long("comparison_replicas", 400));
  if (comp_reps > 0) {
    std::fprintf(stderr, "[decompose] comparison SDE, %d replicas\n",
                 comp_reps);
    const std::vector<double> dts =
        cfg.get_double_list("comparison_dts", {1e-3, 5e-4, 2.5e-4});
    const double delta = cfg.get_double("comparison_delta", 0.1);
    const double ramp = cfg.get_double("comparison_ramp_time", 0.8);
    const double horizon = cfg.get_double("comparison_horizon", 1.0);
    const double obs_dt = cfg.get_double("comparison_obs_dt", 1e-3);
    const double dt_fine =
        *std::min_element(dts.begin(), dts.end());
    const long nf = std::lround(horizon / dt_fine);
    CsvWriter comp(out + "/comparison.csv",
                   {"dt", "mean_grid_violation", "se", "max_grid_violation",
                    "n"});
    for (double dtc : dts) {
      const int agg = static_cast<int>(std::lround(dtc / dt_fine));
      const long n = nf / agg;
      const int obs_every =
          std::max(1, static_cast<int>(std::lround(obs_dt / dtc)));
      std::vector<double> viols;
      viols.reserve(comp_reps);
      for (int rep = 0; rep < comp_reps; ++rep) {
        RngStream rng(seed + 1, static_cast<std::uint64_t>(rep));
        std::vector<double> fine(nf);
        for (long k = 0; k < nf; ++k)
          fine[k] = std::sqrt(dt_fine) * rng.normal();
        std::vector<double> noise(n, 0.0), adot(n);
        for (long k = 0; k < n; ++k) {
          for (int j = 0; j < agg; ++j) noise[k] += fine[k * agg + j];
          adot[k] = delta * (k * dtc) / ramp;
        }
        ComparisonRun run = sde_comparison(adot, delta, dtc, noise);
        double v = 0.0;
        for (long k = obs_every; k <= run.tau_index; k += obs_every)
          v = std::max(v, run.w[k] - run.z[k]);
        viols.push_back(std::max(0.0, v));
      }
      comp.row({dtc, mean(viols), stderr_mean(viols),
                *std::max_element(viols.begin(), viols.end()),
                static_cast<double>(comp_reps)});
    }
  }

  const int scan_reps = static_cast<int>(cfg.get_long("scan_replicas", 0));
  if (scan_reps > 0) {
    std::fprintf(stderr, "[decompose] increment scan, %d replicas\n",
                 scan_reps);
    const double t0 = cfg.get_double("scan_t0", 0.2);
    const std::vector<double> svals =
        cfg.get_double_list("scan_s_values", {0.01, 0.02, 0.04, 0.08});
    const int batches = static_cast<int>(cfg.get_long("scan_batches", 10));
    const int scanN =
        static_cast<int>(cfg.get_long("scan_particles_per_unit", 1000));
    const double scan_dt = cfg.get_double("scan_dt", 5e-4);
    IncrementScan scan = increment_moment_scan(
        law, R, initial, scanN, scan_dt, t0, svals, scan_reps, seed + 2,
        batches);
    CsvWriter sc(out + "/increment_scan.csv", {"s", "moment4", "stderr"});
    for (const IncrementMomentRow& r : scan.rows)
      sc.row({r.s, r.moment4, r.stderr_batch});
    CsvWriter ss(out + "/increment_slope.csv",
                 {"slope", "lo95", "hi95", "n_batches"});
    ss.row({scan.slope, scan.slope_lo95, scan.slope_hi95,
            static_cast<double>(scan.n_batches)});
  }
  return 0;
}

// ------------------------------------------------------- exceptional-times

int cmd_exceptional_times(const CommonArgs& args) {
  Config cfg = resolve_config(args);
  cfg.require_known({"alpha", "epsilons", "particles_per_unit", "dt",
                     "replicas", "seed", "max_particles", "inner_radius",
                     "decomposition_radius", "initial", "dim_min_detections",
                     "threads"});
  const StableLaw law(cfg.get_double("alpha", 0.5));
  const std::vector<double> epsilons =
      cfg.get_double_list("epsilons", {0.2, 0.1, 0.05});
  const int N = static_cast<int>(cfg.get_long("particles_per_unit", 500));
  const double dt = cfg.get_double("dt", 1e-3);
  const int replicas = static_cast<int>(cfg.get_long("replicas", 1000));
  const std::uint64_t seed = cfg.get_long("seed", 1);
  const long max_particles = cfg.get_long("max_particles", 5'000'000);
  const long dim_min = cfg.get_long("dim_min_detections", 100);
  threads_hint(cfg);

  const std::string out = out_dir_or_default(args, "exceptional-times");
  write_manifest(out, cfg, {{"replica_pair_base", seed}});
  CsvWriter reps_csv(out + "/theorem11_replicas.csv",
                     {"epsilon", "replica", "outer_dead_early",
                      "inner_alive_late", "gate_joint", "detected",
                      "first_detect_time", "n_detect_times"});
  CsvWriter summ(out + "/theorem11_summary.csv",
                 {"epsilon", "n_replicas", "gate_freq", "gate_se",
                  "gate_target", "q", "q_se"});
  CsvWriter dim_csv(out + "/detected_dimension.csv",
                    {"epsilon", "slope", "unreliable", "n_times"});

  for (double eps : epsilons) {
    Theorem11Config tc{law};
    tc.epsilon = eps;
    tc.particles_per_unit = N;
    tc.dt = dt;
    tc.n_replicas = replicas;
    tc.seed = seed;
    tc.max_particles = max_particles;
    if (eps >= 0.15) {
      tc.inner_radius = 1.0;
      tc.decomposition_radius = 4.0;
      tc.initial = {{0.0, 0.998}, {-3.0, 0.001}, {3.0, 0.001}};
    } else {
      tc.inner_radius = 3.0;
      tc.decomposition_radius = 8.0;
      tc.initial = {{0.0, 1.0}};
    }
    if (cfg.has("inner_radius")) tc.inner_radius = cfg.get_double("inner_radius");
    if (cfg.has("decomposition_radius"))
      tc.decomposition_radius = cfg.get_double("decomposition_radius");
    if (cfg.has("initial")) tc.initial = cfg.get_atoms("initial");
    std::fprintf(stderr, "[exceptional-times] epsilon=%g initial=%s\n", eps,
                 atoms_to_string(tc.initial).c_str());
    Theorem11Summary s = run_theorem11(tc);
    for (int r = 0; r < static_cast<int>(s.replicas.size()); ++r) {
      const Theorem11Replica& row = s.replicas[r];
      reps_csv.row({eps, static_cast<double>(r),
                    row.outer_dead_early ? 1.0 : 0.0,
                    row.inner_alive_late ? 1.0 : 0.0,
                    row.gate_joint ? 1.0 : 0.0, row.detected ? 1.0 : 0.0,
                    row.first_detect_time,
                    static_cast<double>(row.n_detect_times)});
    }
    summ.row({eps, static_cast<double>(s.n_replicas), s.gate_freq, s.gate_se,
              1.0 - 2.0 * eps, s.q, s.q_se});
    if (static_cast<long>(s.pooled_detect_times.size()) >= dim_min) {
      const double lo = eps * eps, hi = eps;
      std::vector<double> scales;
      for (double sc = (hi - lo) / 8.0; sc > (hi - lo) / 4096.0; sc *= 0.5)
        scales.push_back(sc);
      DimensionEstimate est =
          dimension_of_detected_set(s.pooled_detect_times, lo, hi, scales);
      dim_csv.row({eps, est.slope, est.unreliable ? 1.0 : 0.0,
                   static_cast<double>(s.pooled_detect_times.size())});
    } else {
      dim_csv.row({eps, std::nan(""), 1.0,
                   static_cast<double>(s.pooled_detect_times.size())});
    }
  }
  return 0;
}

// -------------------------------------------------------- near-extinction

int cmd_near_extinction(const CommonArgs& args) {
  Config cfg = resolve_config(args);
  cfg.require_known({"alpha", "epsilons", "r", "lattice_half_width",
                     "initial", "particles_per_unit", "dt", "t_max",
                     "replicas", "seed", "max_particles",
                     "window_start_points", "followup_horizon_factor",
                     "threads"});
  Theorem12Config tc{StableLaw(cfg.get_double("alpha", 0.5))};
  tc.epsilons = cfg.get_double_list("epsilons", {0.2, 0.1, 0.05});
  tc.r = cfg.get_double("r", 0.5);
  tc.lattice_half_width = cfg.get_double("lattice_half_width", 500.0);
  tc.initial = cfg.get_atoms("initial", {{0.0, 1.0}});
  tc.particles_per_unit = static_cast<int>(cfg.get_long("particles_per_unit", 250));
  tc.dt = cfg.get_double("dt", 2e-3);
  tc.t_max = cfg.get_double("t_max", 6.0);
  tc.n_replicas = static_cast<int>(cfg.get_long("replicas", 1000));
  tc.seed = cfg.get_long("seed", 1);
  tc.max_particles = cfg.get_long("max_particles", 5'000'000);
  tc.window_start_points =
      static_cast<int>(cfg.get_long("window_start_points", 20));
  tc.followup_horizon_factor = cfg.get_double("followup_horizon_factor", 100.0);
  threads_hint(cfg);

  const std::string out = out_dir_or_default(args, "near-extinction");
  write_manifest(out, cfg, {{"replica_block_base", tc.seed}});
  std::fprintf(stderr, "[near-extinction] %d replicas, %zu epsilons\n",
               tc.n_replicas, tc.epsilons.size());
  Theorem12Result res = run_theorem12(tc);

  CsvWriter reps_csv(out + "/theorem12_replicas.csv",
                     {"epsilon", "replica", "tau_found", "tau_time",
                      "center_x", "mu_mass", "outer_empty", "inner_majority",
                      "window_gate", "detected", "first_detect_time",
                      "n_detect_times", "extinction_resolved", "f_hat",
                      "support_confined"});
  CsvWriter summ(out + "/theorem12_summary.csv",
                 {"epsilon", "n_triggered", "gate_freq", "gate_se",
                  "gate_target", "q", "q_se", "confined_frac",
                  "n_phase1_unresolved"});
  for (const Theorem12Summary& s : res.per_epsilon) {
    for (int r = 0; r < static_cast<int>(s.replicas.size()); ++r) {
      const Theorem12Replica& row = s.replicas[r];
      reps_csv.row({s.epsilon, static_cast<double>(r),
                    row.tau_found ? 1.0 : 0.0, row.tau_time, row.center_x,
                    row.mu_mass, row.outer_empty ? 1.0 : 0.0,
                    row.inner_majority ? 1.0 : 0.0,
                    row.window_gate ? 1.0 : 0.0, row.detected ? 1.0 : 0.0,
                    row.first_detect_time,
                    static_cast<double>(row.n_detect_times),
                    row.extinction_resolved ? 1.0 : 0.0, row.f_hat,
                    row.support_confined ? 1.0 : 0.0});
    }
    summ.row({s.epsilon, static_cast<double>(s.n_triggered), s.gate_freq,
              s.gate_se, 1.0 - 3.0 * s.epsilon, s.q, s.q_se, s.confined_frac,
              static_cast<double>(res.n_phase1_unresolved)});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-stable superprocess laboratory"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const CommonArgs&);
  };
  const std::vector<Sub> subs = {
      {"simulate", "branching particle / total-mass simulations",
       &cmd_simulate},
      {"verify-moments", "moment recursion vs closed forms and particles",
       &cmd_verify_moments},
      {"verify-kernels", "kernel bound traces, boundary flux, symbol check",
       &cmd_verify_kernels},
      {"bessel", "squared-Bessel zero-set laws and dimensions", &cmd_bessel},
      {"decompose", "labeled decomposition, comparison SDE, increment scan",
       &cmd_decompose},
      {"exceptional-times", "instantaneous-propagation gate and detection",
       &cmd_exceptional_times},
      {"near-extinction", "near-extinction collapse gate and detection",
       &cmd_near_extinction},
  };
  std::vector<CommonArgs> arg_blocks(subs.size());
  std::vector<std::pair<CLI::App*, std::size_t>> cmds;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* c = app.add_subcommand(subs[i].name, subs[i].help);
    add_common_flags(c, arg_blocks[i]);
    cmds.push_back({c, i});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/usage text itself
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [cmd, idx] : cmds)
      if (cmd->parsed()) return subs[idx].run(arg_blocks[idx]);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 4;
  } catch (const GateError& e) {
    std::cerr << "gate error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "gate error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
