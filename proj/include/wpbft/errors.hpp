#pragma once

#include <stdexcept>
#include <string>

namespace wpbft {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative routine failed to meet its tolerance. Carries the best
/// estimate reached and its error bound so callers can decide what to do.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double best_estimate = 0.0,
                 double error_bound = 0.0)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wpbft
