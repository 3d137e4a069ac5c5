#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fraclab {

// Quadrature or series evaluation failed to reach the requested tolerance.
class ComputationError : public std::runtime_error {
 public:
  ComputationError(const std::string& what, double achieved_residual)
      : std::runtime_error(what), residual(achieved_residual) {}
  double residual;
};

// Rejection sampler exceeded its iteration cap.
class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative eigensolver did not converge; carries the residual history.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fraclab
