#include "wpbft/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace wpbft::numerics {

void Tolerance::validate() const {
  if (!(absolute > 0.0)) throw DomainError("tolerance: absolute must be > 0");
  if (!(relative >= 0.0)) throw DomainError("tolerance: relative must be >= 0");
  if (max_iterations < 1) throw DomainError("tolerance: max_iterations must be >= 1");
}

double q_function(double x) {
  if (!std::isfinite(x)) throw DomainError("q_function: non-finite argument");
  // erfc keeps full relative precision in the upper tail; the lower half is
  // taken as a complement so its rounding error stays below half an ulp.
  if (x < 0.0) return 1.0 - 0.5 * std::erfc(-x / std::numbers::sqrt2);
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

namespace {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double q_inverse(double p, const Tolerance& tol) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("q_inverse: p must lie in (0, 1)");
  tol.validate();
  // 1 - p is exact for p in [0.5, 1); solve in the upper tail where Q has
  // full relative precision.
  if (p > 0.5) return -q_inverse(1.0 - p, tol);

  // Q(-40) rounds to 1 and Q(40) to 0, so the root is inside for any
  // representable p in (0, 1).
  double lo = -40.0;
  double hi = 40.0;
  double x = 0.0;
  // Safeguarded Newton: accept the Newton step while it stays inside the
  // bracket, otherwise bisect.
  for (int it = 0; it < 400; ++it) {
    const double residual = q_function(x) - p;
    if (residual == 0.0) return x;
    if (residual > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = normal_pdf(x);
    double next = slope > 0.0 ? x + residual / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(1.0, std::abs(x))) {
      break;
    }
    x = next;
  }
  // Polish: bisect the final bracket down to adjacent doubles.
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (q_function(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double best =
      std::abs(q_function(lo) - p) <= std::abs(q_function(hi) - p) ? lo : hi;
  return best;
}

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double sum = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[i] * sum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod)) {
    throw DomainError("integrate: integrand is not finite on the interval");
  }
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

double integrate(const Integrand& f, double lower, double upper,
                 const Tolerance& tol) {
  tol.validate();
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    throw DomainError("integrate: limits must be finite");
  }
  if (lower > upper) throw DomainError("integrate: lower > upper");
  if (lower == upper) return 0.0;

  std::priority_queue<Segment> work;
  Segment whole = gauss_kronrod(f, lower, upper);
  double total = whole.value;
  double error = whole.error;
  work.push(whole);

  for (int it = 0; it < tol.max_iterations; ++it) {
    if (error <= std::max(tol.absolute, tol.relative * std::abs(total))) {
      return total;
    }
    const Segment worst = work.top();
    work.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
  }
  if (error <= std::max(tol.absolute, tol.relative * std::abs(total))) {
    return total;
  }
  throw NumericalError("integrate: tolerance not reached, error estimate " +
                           std::to_string(error),
                       total, error);
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("log_choose: requires 0 <= k <= n");
  }
  if (k == 0 || k == n) return 0.0;
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
         std::lgamma(nd - kd + 1.0);
}

double log_pow(double p, std::int64_t count) {
  if (count == 0) return 0.0;
  return static_cast<double>(count) * std::log(p);
}

}  // namespace wpbft::numerics
