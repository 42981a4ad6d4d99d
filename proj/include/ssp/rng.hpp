#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ssp {

// Counter-based generator: output k of stream (seed, id) is a fixed hash of
// (seed, id, k).  Streams for distinct replicas are independent of scheduling
// order, so multi-threaded runs reproduce the single-threaded results.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    // double SplitMix64 mix of the (seed, stream) pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
    z = mix(z);
    z = mix(z + stream_id);
    state_ = z;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // uniform on (0,1); never returns 0 or 1
  double u01() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  double exponential() { return -std::log(u01()); }

  // Marsaglia polar method
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * u01() - 1.0;
      v = 2.0 * u01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Exact Binomial(n, p) sample.  Inversion when n*min(p,1-p) < 10, otherwise
// Hormann's BTRD transformed rejection with an exact log-pmf acceptance test
// in place of the squeeze steps.  Much faster than constructing a
// std::binomial_distribution per call when n changes every draw.
long binomial_draw(long n, double p, RngStream& rng);

}  // namespace ssp
