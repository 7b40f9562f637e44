#pragma once

#include <stdexcept>
#include <string>

namespace dynquant {

/// Trajectory integration produced a non-finite value.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Requested Lindblad factorization does not exist (diffusion matrix not PSD).
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double negative_eigenvalue)
      : std::runtime_error(what), negative_eigenvalue_(negative_eigenvalue) {}
  double negative_eigenvalue() const { return negative_eigenvalue_; }

 private:
  double negative_eigenvalue_;
};

}  // namespace dynquant
