#pragma once
#include <stdexcept>
#include <string>

namespace cld {

/// Error thrown on contract violations: malformed grids, unresolvable scales,
/// out-of-domain states, bad files. The CLI maps these to exit code 1.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cld
