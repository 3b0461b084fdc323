#pragma once

#include <stdexcept>
#include <string>

namespace rwre {

// Malformed configuration or an infeasible request (oracle refusals included).
// The CLI maps these to exit code 2.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rwre
