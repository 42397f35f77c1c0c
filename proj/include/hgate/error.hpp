#pragma once

#include <stdexcept>
#include <string>

namespace hgate {

/// Base error for every failure the library reports.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iteration failed to converge (Newton, fixed point, step control).
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

/// A declared exponential-decay assumption was contradicted by samples.
struct DecayError : Error {
  explicit DecayError(const std::string& msg) : Error(msg) {}
};

/// Invalid argument or configuration value.
struct InvalidInput : Error {
  explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

}  // namespace hgate
