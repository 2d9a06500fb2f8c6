#pragma once

#include <cstdint>
#include <functional>

#include "wpbft/errors.hpp"

namespace wpbft::numerics {

/// Stopping rule shared by the iterative routines.
struct Tolerance {
  double absolute = 1e-10;
  double relative = 0.0;
  int max_iterations = 200;

  /// Throws DomainError unless absolute > 0, relative >= 0 and
  /// max_iterations >= 1.
  void validate() const;
};

/// Gaussian tail probability P(Z > x) for standard normal Z.
double q_function(double x);

/// Inverse of q_function on (0, 1).
double q_inverse(double p, const Tolerance& tol = {});

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) quadrature on [lower, upper]. Subintervals
/// are bisected until the summed error estimate satisfies
/// max(tol.absolute, tol.relative * |result|). max_iterations caps the
/// number of bisections.
double integrate(const Integrand& f, double lower, double upper,
                 const Tolerance& tol = {});

/// ln C(n, k).
double log_choose(std::int64_t n, std::int64_t k);

/// ln(p^count) with the convention 0 * ln(0) = 0, so that log_pow(0, 0) = 0
/// and log_pow(0, k > 0) = -inf.
double log_pow(double p, std::int64_t count);

}  // namespace wpbft::numerics
