#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wpbft/channel.hpp"
#include "wpbft/consensus.hpp"
#include "wpbft/latency.hpp"
#include "wpbft/simulator.hpp"

namespace wpbft::experiment {

enum class ThresholdUnit { db, linear };

/// One (SNR threshold, node density) operating point. The threshold is in
/// the configured ThresholdUnit.
struct Setting {
  double snr_threshold = 6.0;
  double density = 2.0;
};

enum class Output { ps, stages, consensus, delays, sim };

struct ExperimentSpec {
  std::vector<channel::SignalProfile> profiles = channel::preset_profiles();
  std::vector<Setting> settings = {{6.0, 2.0}, {6.0, 5.0}, {4.0, 5.0}};
  ThresholdUnit threshold_unit = ThresholdUnit::db;
  std::vector<int> n_values = default_n_values();
  std::optional<sim::SimConfig> sim;
  std::vector<Output> outputs = {Output::ps, Output::stages, Output::consensus,
                                 Output::delays};
  latency::ErrorModel error_model;
  numerics::Tolerance tolerance;
  /// Exploratory simulator variant with per-node distances fixed per trial.
  bool fixed_positions = false;
  /// Sweep workers; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;

  /// n = 4, 7, ..., 100.
  static std::vector<int> default_n_values();

  /// Throws ConfigError naming the offending value.
  void validate() const;
  bool wants(Output output) const;
  double threshold_db(const Setting& setting) const;
};

struct ResultRow {
  std::string signal;
  double z_db = 0.0;
  double gamma = 0.0;
  int n = 0;
  int f = 0;
  double ps = 0.0;
  consensus::StageReport stages;
  latency::DelayReport delays;
  std::optional<sim::SimEstimate> sim;
};

/// Evaluates every (profile, setting, n) tuple; rows come back ordered by
/// profile, then setting, then n, independent of scheduling.
std::vector<ResultRow> run_sweep(const ExperimentSpec& spec);

/// Evaluates a single operating point with the configured model options.
ResultRow evaluate_point(const ExperimentSpec& spec,
                         const channel::SignalProfile& profile,
                         const Setting& setting, int n,
                         std::uint64_t sim_seed);

/// Reads a key-value configuration file with [profiles], [settings],
/// [n_values], [sim], [outputs] and [model] sections. Omitted sections keep
/// their defaults.
ExperimentSpec load_spec(const std::filesystem::path& path);
ExperimentSpec parse_spec(std::istream& in, const std::string& source = "<input>");

std::vector<std::string> csv_columns(const ExperimentSpec& spec);

/// Header plus one record per row, numbers in shortest round-trip form.
void emit_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
              std::ostream& out);

/// Gnuplot script plotting the CSV's probability and delay columns.
void emit_gnuplot(const ExperimentSpec& spec, const std::string& csv_path,
                  std::ostream& out);

/// One simulator-versus-analytic comparison of the validation suite.
struct ValidationCheck {
  std::string label;
  double expected = 0.0;
  sim::SimEstimate estimate;
  bool passed = false;
};

/// Analytic consensus rate against the iid-link simulator over
/// n in {4, 7, 10, 13} x ps in {0.8, 0.9, 0.95}, plus geometric-mode against
/// iid-link mode (overlapping intervals) for each preset at n = 4 and 10.
std::vector<ValidationCheck> run_validation(const sim::SimConfig& config);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace wpbft::experiment
