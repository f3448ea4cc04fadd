#pragma once

#include <stdexcept>
#include <string>

namespace vrmhd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidGrid : Error {
  using Error::Error;
};

struct InvalidState : Error {
  using Error::Error;
};

struct InvalidParams : Error {
  using Error::Error;
};

struct StaggeringMismatch : Error {
  using Error::Error;
};

// Raised when density or pressure leaves the admissible set. No floors are applied.
struct PositivityFailure : Error {
  using Error::Error;
};

struct SolverFailure : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace vrmhd
