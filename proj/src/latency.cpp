#include "wpbft/latency.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wpbft/errors.hpp"

namespace wpbft::latency {

namespace {

double log_in_base(double x, LogBase base) {
  switch (base) {
    case LogBase::two:
      return std::log2(x);
    case LogBase::ten:
      return std::log10(x);
    case LogBase::e:
      break;
  }
  return std::log(x);
}

double ln_base(LogBase base) {
  switch (base) {
    case LogBase::two:
      return std::numbers::ln2;
    case LogBase::ten:
      return std::numbers::ln10;
    case LogBase::e:
      break;
  }
  return 1.0;
}

/// Per-unit-blocklength margin multiplying m in the numerator.
double rate_margin(const channel::SignalProfile& profile,
                   const ErrorModel& model) {
  if (model.units == RateUnits::raw_bits_per_second) {
    return profile.capacity - profile.rate;
  }
  return profile.capacity / profile.bandwidth - profile.rate / profile.bandwidth;
}

}  // namespace

double blocklength(const channel::SignalProfile& profile, double duration,
                   const ErrorModel& model) {
  return static_cast<double>(model.subcarriers) * duration * profile.bandwidth;
}

double error_argument(const channel::SignalProfile& profile, double m,
                      const ErrorModel& model) {
  if (!(m > 0.0)) throw DomainError("error_argument: blocklength must be > 0");
  const double numerator =
      m * rate_margin(profile, model) + log_in_base(m, model.log_base) / 2.0;
  return numerator / (log_in_base(std::numbers::e, model.log_base) * std::sqrt(m));
}

double increasing_branch_start(const channel::SignalProfile& profile,
                               const ErrorModel& model) {
  // With a = margin and L = ln(base), the argument is
  // g(m) = a L sqrt(m) + ln(m) / (2 sqrt(m)); g'(m) = 0 reduces to
  // h(m) = 2 a L m + 2 - ln(m) = 0. h is convex with its minimum at
  // m = 1 / (2 a L), so g is increasing everywhere when h stays positive
  // and otherwise from the larger root of h onwards.
  const double slope = 2.0 * rate_margin(profile, model) * ln_base(model.log_base);
  if (!(slope > 0.0)) {
    throw DomainError("error model: capacity must exceed rate");
  }
  auto h = [slope](double m) { return slope * m + 2.0 - std::log(m); };
  double lo = 1.0 / slope;
  if (h(lo) > 0.0) return 0.0;
  double hi = 2.0 * lo;
  while (h(hi) <= 0.0) hi *= 2.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double error_prob_for_duration(const channel::SignalProfile& profile,
                               double duration, const ErrorModel& model) {
  if (!(duration > 0.0)) {
    throw DomainError("error_prob_for_duration: duration must be > 0");
  }
  return numerics::q_function(
      error_argument(profile, blocklength(profile, duration, model), model));
}

double solve_symbol_duration(const channel::SignalProfile& profile, double ps,
                             const numerics::Tolerance& tol,
                             const ErrorModel& model) {
  if (!(ps > 0.0 && ps < 1.0)) {
    throw DomainError("solve_symbol_duration: ps must lie in (0, 1)");
  }
  tol.validate();
  const double target = numerics::q_inverse(1.0 - ps);
  auto arg = [&](double m) { return error_argument(profile, m, model); };

  const double branch_start = increasing_branch_start(profile, model);
  double lo = 0.0;
  double hi = 0.0;
  if (branch_start > 0.0) {
    lo = branch_start;
    if (arg(lo) > target) {
      throw NumericalError(
          "solve_symbol_duration: target error probability is above the "
          "increasing branch, no bracket");
    }
    hi = 2.0 * lo;
  } else {
    lo = 1.0;
    while (arg(lo) > target) {
      lo *= 0.5;
      if (lo < 1e-300) throw NumericalError("solve_symbol_duration: no lower bracket");
    }
    hi = 2.0 * lo;
  }
  while (arg(hi) < target) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("solve_symbol_duration: no upper bracket");
  }

  // Bisect on the blocklength until the bracket collapses to adjacent
  // doubles; this is well inside any residual tolerance the caller sets.
  int iterations = 0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (arg(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (++iterations > 4000) break;
  }
  const double m = std::abs(arg(lo) - target) <= std::abs(arg(hi) - target) ? lo : hi;
  const double duration =
      m / (static_cast<double>(model.subcarriers) * profile.bandwidth);
  const double residual =
      std::abs(error_prob_for_duration(profile, duration, model) - (1.0 - ps));
  if (residual > std::max(tol.absolute, tol.relative * (1.0 - ps))) {
    throw NumericalError("solve_symbol_duration: residual " +
                             std::to_string(residual) + " above tolerance",
                         duration, residual);
  }
  return duration;
}

DelayReport make_delay_report(double symbol_duration, int node_count) {
  DelayReport report;
  report.symbol_duration = symbol_duration;
  report.broadcast_delay = static_cast<double>(node_count - 1) * symbol_duration;
  report.reply_delay = symbol_duration;
  report.total_delay = 3.0 * report.broadcast_delay + report.reply_delay;
  return report;
}

DelayReport delay_report(const channel::SignalProfile& profile,
                         const channel::NetworkGeometry& geometry,
                         const numerics::Tolerance& tol,
                         const ErrorModel& model) {
  const double ps = channel::avg_success_prob(profile, geometry, tol);
  if (ps >= 1.0) {
    throw DomainError(
        "delay_report: ps = 1 leaves no error probability to solve for");
  }
  if (ps <= 0.0) throw DomainError("delay_report: ps = 0");
  return make_delay_report(solve_symbol_duration(profile, ps, tol, model),
                           geometry.node_count());
}

}  // namespace wpbft::latency
