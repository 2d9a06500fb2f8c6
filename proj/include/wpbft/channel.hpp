#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wpbft/numerics.hpp"

namespace wpbft::channel {

/// Physical parameters of one signal class. Powers in watts, bandwidth and
/// carrier in hertz, capacity and rate in bits per second.
struct SignalProfile {
  std::string name;
  double transmit_power = 1.0;
  double noise_power = 0.2;
  double bandwidth = 1.0;
  double capacity = 2.0;
  double rate = 1.0;
  double path_loss_exponent = 2.0;
  double carrier_frequency = 1.0;

  /// Throws DomainError on non-positive powers, bandwidth or exponent, or
  /// when capacity > rate > 0 does not hold.
  void validate() const;
};

/// 0.22 THz preset (B = 10 GHz, C = 80 Gbps, R = 40 Gbps, alpha = 2.229).
SignalProfile thz_profile();
/// 28 GHz preset (B = 800 MHz, C = 8 Gbps, R = 4 Gbps, alpha = 1.7).
SignalProfile mmwave_profile();
/// Built-in presets in canonical order.
std::vector<SignalProfile> preset_profiles();
/// Looks up a preset by name ("thz-0.22", "mmwave-28").
std::optional<SignalProfile> find_preset(std::string_view name);

/// Node population spread over a disk whose radius follows from the node
/// count and density: R = sqrt(n / (pi * density)).
class NetworkGeometry {
 public:
  NetworkGeometry(int node_count, double density, double snr_threshold_db);

  int node_count() const { return node_count_; }
  double density() const { return density_; }
  double snr_threshold_db() const { return snr_threshold_db_; }
  double snr_threshold_linear() const;
  double radius() const { return radius_; }

 private:
  int node_count_;
  double density_;
  double snr_threshold_db_;
  double radius_;
};

/// Parameters of the log-distance path loss with close-in free-space anchor.
struct PathLossSample {
  double reference_distance = 1.0;  // metres
  double shadowing_sigma = 0.0;     // dB
  double shadow_draw = 0.0;         // dB, one realisation of X_sigma

  void validate() const;
};

inline constexpr double kSpeedOfLight = 299792458.0;

double db_to_linear(double value_db);
double linear_to_db(double value);

/// Received SNR, P_T * h * r^-alpha / P_N.
double snr(const SignalProfile& profile, double fading_gain, double distance);

/// Free-space loss at the reference distance, 20 log10(4 pi r0 f / c).
double free_space_loss_db(const SignalProfile& profile,
                          double reference_distance);

/// PL(r0) + 10 alpha log10(r / r0) + X_sigma, in dB.
double path_loss_db(const SignalProfile& profile, const PathLossSample& sample,
                    double distance);

/// P{SNR > z} at a fixed distance with Exp(1) fading.
double link_success_prob(const SignalProfile& profile, double z_linear,
                         double distance);

/// Transmission success probability averaged over the distance density
/// 2r/R^2 on [0, R].
double avg_success_prob(const SignalProfile& profile,
                        const NetworkGeometry& geometry,
                        const numerics::Tolerance& tol = {});

/// Largest distance at which a link with fading gain h still meets the
/// threshold: (P_T h / (z P_N))^(1/alpha).
double active_distance(const SignalProfile& profile, double z_linear,
                       double fading_gain = 1.0);

}  // namespace wpbft::channel
