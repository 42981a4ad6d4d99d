#include "ssp/stable_law.hpp"

#include <cmath>
#include <stdexcept>

#include "ssp/common.hpp"

namespace ssp {

double levy_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw GateError("levy_constant: alpha must lie in (0,2)");
  return std::tgamma(1.0 + alpha) * std::sin(0.5 * M_PI * alpha) / M_PI;
}

StableLaw::StableLaw(double alpha_in)
    : alpha(alpha_in), c_alpha(levy_constant(alpha_in)) {}

StableLaw make_stable_law(double alpha) { return StableLaw(alpha); }

}  // namespace ssp
