#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fnls {

/// Base class for failures raised while advancing a trajectory.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  /// Simulation time at which the failure was detected (NaN if unknown).
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// The Picard iteration of a Duhamel step did not reach its tolerance.
class NonConvergence : public SolverError {
 public:
  NonConvergence(int iterations, double residual,
                 double time = std::numeric_limits<double>::quiet_NaN())
      : SolverError(message(iterations, residual, time), time),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

  NonConvergence at_time(double t) const {
    return NonConvergence(iterations_, residual_, t);
  }

 private:
  static std::string message(int iterations, double residual, double time) {
    std::string msg = "Picard iteration did not converge after " +
                      std::to_string(iterations) +
                      " iterations (last update " + std::to_string(residual) +
                      ")";
    if (!std::isnan(time)) msg += " at t=" + std::to_string(time);
    return msg;
  }

  int iterations_;
  double residual_;
};

/// A coefficient became NaN or infinite.
class NonFinite : public SolverError {
 public:
  explicit NonFinite(double time)
      : SolverError("non-finite coefficient at t=" + std::to_string(time),
                    time) {}
};

}  // namespace fnls
