#include "wpbft/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wpbft/errors.hpp"

namespace wpbft::channel {

void SignalProfile::validate() const {
  if (!(transmit_power > 0.0)) throw DomainError(name + ": transmit_power must be > 0");
  if (!(noise_power > 0.0)) throw DomainError(name + ": noise_power must be > 0");
  if (!(bandwidth > 0.0)) throw DomainError(name + ": bandwidth must be > 0");
  if (!(rate > 0.0 && capacity > rate)) {
    throw DomainError(name + ": requires capacity > rate > 0");
  }
  if (!(path_loss_exponent > 0.0)) {
    throw DomainError(name + ": path_loss_exponent must be > 0");
  }
  if (!(carrier_frequency > 0.0)) {
    throw DomainError(name + ": carrier_frequency must be > 0");
  }
}

SignalProfile thz_profile() {
  return {.name = "thz-0.22",
          .transmit_power = 1.0,
          .noise_power = 0.2,
          .bandwidth = 10e9,
          .capacity = 80e9,
          .rate = 40e9,
          .path_loss_exponent = 2.229,
          .carrier_frequency = 0.22e12};
}

SignalProfile mmwave_profile() {
  return {.name = "mmwave-28",
          .transmit_power = 1.0,
          .noise_power = 0.2,
          .bandwidth = 800e6,
          .capacity = 8e9,
          .rate = 4e9,
          .path_loss_exponent = 1.7,
          .carrier_frequency = 28e9};
}

std::vector<SignalProfile> preset_profiles() {
  return {thz_profile(), mmwave_profile()};
}

std::optional<SignalProfile> find_preset(std::string_view name) {
  for (auto& p : preset_profiles()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

NetworkGeometry::NetworkGeometry(int node_count, double density,
                                 double snr_threshold_db)
    : node_count_(node_count),
      density_(density),
      snr_threshold_db_(snr_threshold_db) {
  if (node_count < 4) throw DomainError("geometry: node_count must be >= 4");
  if (!(density > 0.0) || !std::isfinite(density)) {
    throw DomainError("geometry: density must be > 0");
  }
  if (std::isnan(snr_threshold_db) || snr_threshold_db == HUGE_VAL) {
    throw DomainError("geometry: snr threshold must be a number below +inf");
  }
  radius_ = std::sqrt(static_cast<double>(node_count) /
                      (std::numbers::pi * density));
}

double NetworkGeometry::snr_threshold_linear() const {
  return db_to_linear(snr_threshold_db_);
}

void PathLossSample::validate() const {
  if (!(reference_distance > 0.0)) {
    throw DomainError("path loss: reference_distance must be > 0");
  }
  if (!(shadowing_sigma >= 0.0)) {
    throw DomainError("path loss: shadowing_sigma must be >= 0");
  }
}

double db_to_linear(double value_db) { return std::pow(10.0, value_db / 10.0); }

double linear_to_db(double value) { return 10.0 * std::log10(value); }

double snr(const SignalProfile& profile, double fading_gain, double distance) {
  if (!(fading_gain >= 0.0)) throw DomainError("snr: fading gain must be >= 0");
  if (!(distance > 0.0)) throw DomainError("snr: distance must be > 0");
  return profile.transmit_power * fading_gain *
         std::pow(distance, -profile.path_loss_exponent) / profile.noise_power;
}

double free_space_loss_db(const SignalProfile& profile,
                          double reference_distance) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * reference_distance *
                           profile.carrier_frequency / kSpeedOfLight);
}

double path_loss_db(const SignalProfile& profile, const PathLossSample& sample,
                    double distance) {
  sample.validate();
  if (!(distance > 0.0)) throw DomainError("path_loss_db: distance must be > 0");
  return free_space_loss_db(profile, sample.reference_distance) +
         10.0 * profile.path_loss_exponent *
             std::log10(distance / sample.reference_distance) +
         sample.shadow_draw;
}

double link_success_prob(const SignalProfile& profile, double z_linear,
                         double distance) {
  if (!(z_linear >= 0.0)) throw DomainError("link_success_prob: z must be >= 0");
  if (!(distance > 0.0)) {
    throw DomainError("link_success_prob: distance must be > 0");
  }
  return std::exp(-profile.noise_power *
                  std::pow(distance, profile.path_loss_exponent) * z_linear /
                  profile.transmit_power);
}

double avg_success_prob(const SignalProfile& profile,
                        const NetworkGeometry& geometry,
                        const numerics::Tolerance& tol) {
  const double z = geometry.snr_threshold_linear();
  if (z == 0.0) return 1.0;
  const double radius = geometry.radius();
  const double scale = profile.noise_power * z / profile.transmit_power;
  const double alpha = profile.path_loss_exponent;
  // The integrand vanishes at r = 0, where link_success_prob is undefined.
  auto integrand = [&](double r) {
    return r * std::exp(-scale * std::pow(r, alpha));
  };
  const double integral = numerics::integrate(integrand, 0.0, radius, tol);
  const double ps = 2.0 * integral / (radius * radius);
  return std::clamp(ps, 0.0, 1.0);
}

double active_distance(const SignalProfile& profile, double z_linear,
                       double fading_gain) {
  if (!(z_linear > 0.0)) {
    throw DomainError("active_distance: z must be > 0 (unbounded otherwise)");
  }
  if (!(fading_gain > 0.0)) {
    throw DomainError("active_distance: fading gain must be > 0");
  }
  const double ratio = profile.transmit_power * fading_gain /
                       (z_linear * profile.noise_power);
  return std::pow(ratio, 1.0 / profile.path_loss_exponent);
}

}  // namespace wpbft::channel
