#pragma once

#include <stdexcept>
#include <string>

namespace contlim {

// Configuration file or experiment-setup problems. CLI exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation of a reference solution past its certified classical horizon.
class horizon_error : public std::runtime_error {
 public:
  explicit horizon_error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite forces or state during time integration.
class integration_error : public std::runtime_error {
 public:
  explicit integration_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace contlim
