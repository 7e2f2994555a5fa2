#pragma once

#include <stdexcept>
#include <string>

namespace diamondcomb {

// Bad or missing configuration / input documents (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Physically inconsistent data or failed physics validation (exit code 3).
struct PhysicsError : std::runtime_error {
  explicit PhysicsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during evaluation (exit code 4).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace diamondcomb
