#pragma once

#include <stdexcept>
#include <string>

namespace ssp {

// point mass used to describe initial measures
struct Atom {
  double x;
  double mass;
};

// config-file / CLI parse problems -> exit 2
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// parameter-domain gates (alpha >= 2/3 etc.) -> exit 3
struct GateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// runtime caps (population blow-up, horizon overruns) -> exit 4
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ssp
