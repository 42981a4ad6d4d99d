#pragma once

namespace ssp {

// Symmetric alpha-stable law on R, characteristic function exp(-t|xi|^alpha).
// `c_alpha` is the constant in the jump kernel c_alpha |y-x|^{-1-alpha}
// that makes the generator's Fourier symbol exactly -|xi|^alpha.
struct StableLaw {
  // Computes c_alpha from alpha; throws GateError unless alpha is in (0, 2).
  explicit StableLaw(double alpha);

  double alpha;
  double c_alpha;
};

// c_alpha = Gamma(1+alpha) sin(pi alpha / 2) / pi; equals 1/pi at alpha = 1.
double levy_constant(double alpha);

StableLaw make_stable_law(double alpha);

}  // namespace ssp
