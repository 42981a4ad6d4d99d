#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SUPERLAB_BIN
#error "SUPERLAB_BIN must point at the command-line binary"
#endif

namespace {

int run(const std::string& args) {
  const std::string cmd =
      std::string(SUPERLAB_BIN) + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

const std::string kFastKernels =
    "verify-kernels --set alpha=0.5 --set gamma=0 --set levels=2"
    " --set s_grid=0.1,0.2 --set y_grid=0,1 --set t_grid=0.1"
    " --set y36_grid=0 --set mc_paths=400 --set mc_steps=20"
    " --set s35_grid=0.1 --set x35_grid=0,1 --set flux_points=20"
    " --set xi_grid=1 ";

const std::string kFastSimBase =
    "simulate --set mode=count --set particles_per_unit=50 --set dt=2e-3"
    " --set t_max=0.5 --set record_points=8 --replicas 50 ";
const std::string kFastSim = kFastSimBase + "--seed 5 ";

}  // namespace

TEST_CASE("boundary-weight zero and admissible alpha run to success") {
  CHECK(run(kFastKernels + "--out cli_k1") == 0);
  CHECK(exists("cli_k1/bound_report.csv"));
  CHECK(exists("cli_k1/flux_check.csv"));
  CHECK(exists("cli_k1/symbol_check.csv"));
  CHECK(exists("cli_k1/manifest.txt"));
  const std::string rep = slurp("cli_k1/bound_report.csv");
  CHECK(rep.rfind("lemma,alpha,R,gamma,rho,level,sup_ratio\n", 0) == 0);
  CHECK(rep.find("3.4") != std::string::npos);
}

TEST_CASE("parameter gates exit with code 3") {
  CHECK(run("exceptional-times --set alpha=0.8 --out cli_g1") == 3);
  CHECK(run("near-extinction --set alpha=0.9 --out cli_g2") == 3);
  CHECK(run("bessel --set delta=0.7 --set mc_paths=10 --set dim_paths=0"
            " --out cli_g3") == 3);
}

TEST_CASE("config problems exit with code 2") {
  CHECK(run(kFastSim + "--set not_a_key=1 --out cli_c1") == 2);
  CHECK(run("simulate --config cli_missing.cfg --out cli_c2") == 2);
  {
    std::ofstream bad("cli_bad.cfg");
    bad << "alpha = zebra\n";
  }
  CHECK(run("simulate --config cli_bad.cfg --out cli_c3") == 2);
  CHECK(run("") == 2);                       // missing subcommand
  CHECK(run("simulate --set oops --out x") == 2);  // malformed KEY=VALUE
  CHECK(run("simulate --set threads=0 --out x") == 2);
}

TEST_CASE("runtime caps exit with code 4") {
  CHECK(run("simulate --set mode=particles --set alpha=1.0 --set t_max=2"
            " --set max_particles=40 --set particles_per_unit=30"
            " --replicas 10 --out cli_cap") == 4);
}

TEST_CASE("identical config and seed produce byte-identical outputs") {
  CHECK(run(kFastSim + "--out cli_d1") == 0);
  CHECK(run(kFastSim + "--out cli_d2") == 0);
  CHECK(slurp("cli_d1/extinction.csv") == slurp("cli_d2/extinction.csv"));
  CHECK(slurp("cli_d1/survival.csv") == slurp("cli_d2/survival.csv"));
  CHECK(slurp("cli_d1/manifest.txt") == slurp("cli_d2/manifest.txt"));
  // different seed changes the data
  CHECK(run(kFastSimBase + "--seed 6 --out cli_d3") == 0);
  CHECK(slurp("cli_d1/extinction.csv") != slurp("cli_d3/extinction.csv"));
}

TEST_CASE("a config file plus --set overlays resolves like pure --set") {
  {
    std::ofstream cfg("cli_base.cfg");
    cfg << "mode = count\nparticles_per_unit = 50\ndt = 2e-3\n"
           "t_max = 0.5\nrecord_points = 8\nreplicas = 50\nseed = 5\n";
  }
  CHECK(run("simulate --config cli_base.cfg --out cli_f1") == 0);
  CHECK(slurp("cli_f1/extinction.csv") == slurp("cli_d1/extinction.csv"));
  // --set beats the file
  CHECK(run("simulate --config cli_base.cfg --set seed=6 --out cli_f2") == 0);
  CHECK(slurp("cli_f2/extinction.csv") == slurp("cli_d3/extinction.csv"));
}

TEST_CASE("data goes to files, progress to stderr, stdout stays clean") {
  CHECK(run(kFastSim + "--out cli_s1") == 0);
  CHECK(slurp("cli_stdout.txt").empty());
  CHECK(!slurp("cli_stderr.txt").empty());
}
