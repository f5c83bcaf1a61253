#pragma once

#include <stdexcept>
#include <string>

namespace vhpf {

/// Invalid scenario, workspace, or parameter values detected before or
/// during setup.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relaxation failed to reach the requested residual within the cap.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A field or geometry query at a point where it is undefined.
class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two agent centers coincide, so no interaction direction exists.
class CoincidentCentersError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vhpf
