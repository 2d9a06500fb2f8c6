#pragma once

#include "wpbft/channel.hpp"
#include "wpbft/numerics.hpp"

namespace wpbft::latency {

enum class LogBase { two, e, ten };

/// How capacity and rate enter the finite-blocklength relation.
enum class RateUnits {
  /// C and R in bit/s multiplied by the blocklength N T B, as printed. This
  /// form yields the attosecond-scale delays (THz T ~ 0.039 as, mmWave
  /// T ~ 4.388 as) and is the default.
  raw_bits_per_second,
  /// C/B and R/B in bits per channel use, the dimensionally consistent
  /// normal-approximation form.
  spectral_efficiency,
};

struct ErrorModel {
  LogBase log_base = LogBase::two;
  RateUnits units = RateUnits::raw_bits_per_second;
  int subcarriers = 1;
};

struct DelayReport {
  double symbol_duration = 0.0;  // T
  double broadcast_delay = 0.0;  // t1 = (n - 1) T
  double reply_delay = 0.0;      // t2 = T
  double total_delay = 0.0;      // 3 t1 + t2
};

/// Blocklength m = N T B for a transmission lasting `duration` seconds.
double blocklength(const channel::SignalProfile& profile, double duration,
                   const ErrorModel& model = {});

/// Argument of the Q function for blocklength m:
/// (m c - m r + log(m)/2) / (log(e) sqrt(m)).
double error_argument(const channel::SignalProfile& profile, double m,
                      const ErrorModel& model = {});

/// Smallest blocklength of the branch on which error_argument is increasing.
/// Zero when the argument is increasing for every m > 0.
double increasing_branch_start(const channel::SignalProfile& profile,
                               const ErrorModel& model = {});

/// Decoding error probability of a transmission of the given duration.
double error_prob_for_duration(const channel::SignalProfile& profile,
                               double duration, const ErrorModel& model = {});

/// Duration T whose error probability equals 1 - ps, searched on the
/// increasing branch of the Q-function argument by bracketing and bisection.
double solve_symbol_duration(const channel::SignalProfile& profile, double ps,
                             const numerics::Tolerance& tol = {},
                             const ErrorModel& model = {});

/// Builds the delay aggregates from a symbol duration and node count.
DelayReport make_delay_report(double symbol_duration, int node_count);

/// Delays for the geometry's average transmission success probability.
DelayReport delay_report(const channel::SignalProfile& profile,
                         const channel::NetworkGeometry& geometry,
                         const numerics::Tolerance& tol = {},
                         const ErrorModel& model = {});

}  // namespace wpbft::latency
