#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <variant>

#include "wpbft/channel.hpp"
#include "wpbft/consensus.hpp"

namespace wpbft::sim {

enum class Mode { iid_link, geometric };

struct SimConfig {
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  Mode mode = Mode::iid_link;
  double confidence_level = 0.99;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;

  void validate() const;
};

/// Every link succeeds independently with a fixed probability.
struct FixedLink {
  double ps = 1.0;
};

/// Links drawn from the channel model: a distance from the 2r/R^2 density
/// and an Exp(1) fading gain per message, success iff SNR > z.
struct GeometricLink {
  channel::SignalProfile profile;
  channel::NetworkGeometry geometry;
  /// Replaces the Exp(1) draw with a constant gain.
  std::optional<double> fixed_fading;
  /// Sampled distances are clamped to at most this value.
  std::optional<double> distance_cap;
  /// Exploratory: one distance per node per trial, reused by every message
  /// that node receives, instead of a fresh distance per message.
  bool fixed_positions = false;
};

using LinkModel = std::variant<FixedLink, GeometricLink>;

inline constexpr int kStageCount = 4;

struct TrialOutcome {
  bool success = false;
  /// Failures counted in each stage; stages after the failing one stay 0.
  std::array<int, kStageCount> failures{};
  /// Number of stages actually executed (1..4).
  int stages_run = 0;
};

/// Frequency table of failure counts per stage (only stages that ran).
using StageHistogram = std::array<std::map<int, std::int64_t>, kStageCount>;

struct SimEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  StageHistogram stage_failure_histogram;

  bool operator==(const SimEstimate&) const = default;
};

/// Random stream for one trial. Seeded from (seed, trial index) so every
/// trial sees the same numbers regardless of which thread runs it.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial_index);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_closed();
  /// Uniform on (0, 1).
  double uniform_open();

 private:
  std::mt19937_64 engine_;
};

/// radius * sqrt(u) for u on (0, 1]; density 2r / R^2 on (0, R].
double sample_distance(TrialRng& rng, double radius);
double distance_from_uniform(double u, double radius);

/// Exp(1) gain -ln(u), u on (0, 1).
double sample_fading(TrialRng& rng);
double fading_from_uniform(double u);

TrialOutcome run_trial(TrialRng& rng, const consensus::FaultBudget& budget,
                       const LinkModel& link);

/// Wilson score interval for `successes` out of `trials`.
std::pair<double, double> wilson_interval(std::int64_t successes,
                                          std::int64_t trials,
                                          double confidence_level);

SimEstimate estimate_consensus_rate(const SimConfig& config,
                                    const consensus::FaultBudget& budget,
                                    const LinkModel& link);

}  // namespace wpbft::sim
