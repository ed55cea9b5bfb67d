#pragma once

#include <stdexcept>

namespace tcqlf {

// Rejected scenario or parameter combination.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (trace, CSV, config).
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tcqlf
