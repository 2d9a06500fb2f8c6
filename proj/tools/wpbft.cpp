// Command-line experiment runner for wireless PBFT performance sweeps.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "wpbft/channel.hpp"
#include "wpbft/errors.hpp"
#include "wpbft/experiment.hpp"

namespace {

using namespace wpbft;

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalError = 2, kValidationFailed = 3 };

struct ModelFlags {
  std::string threshold_unit;
  bool raw_eq11 = false;
  bool spectral_eq11 = false;
  std::string log_base;
  unsigned threads = 0;

  void add_to(CLI::App& app) {
    app.add_option("--threshold-unit", threshold_unit,
                   "Unit of the SNR thresholds (db|linear)")
        ->check(CLI::IsMember({"db", "linear"}));
    auto* raw = app.add_flag("--raw-eq11", raw_eq11,
                             "Capacity and rate in bit/s in the error relation (default)");
    auto* spectral = app.add_flag("--spectral-eq11", spectral_eq11,
                                  "Capacity and rate in bits per channel use (C/B, R/B)");
    raw->excludes(spectral);
    app.add_option("--log-base", log_base, "Logarithm base in the error relation (2|e|10)")
        ->check(CLI::IsMember({"2", "e", "10"}));
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  }

  void apply(experiment::ExperimentSpec& spec) const {
    if (threshold_unit == "db") spec.threshold_unit = experiment::ThresholdUnit::db;
    if (threshold_unit == "linear") spec.threshold_unit = experiment::ThresholdUnit::linear;
    if (raw_eq11) spec.error_model.units = latency::RateUnits::raw_bits_per_second;
    if (spectral_eq11) spec.error_model.units = latency::RateUnits::spectral_efficiency;
    if (log_base == "2") spec.error_model.log_base = latency::LogBase::two;
    if (log_base == "e") spec.error_model.log_base = latency::LogBase::e;
    if (log_base == "10") spec.error_model.log_base = latency::LogBase::ten;
    if (threads != 0) spec.threads = threads;
  }
};

channel::SignalProfile require_profile(const std::string& name) {
  auto profile = channel::find_preset(name);
  if (!profile) throw ConfigError("unknown signal profile '" + name + "'");
  return *profile;
}

void print_point(const experiment::ExperimentSpec& spec,
                 const experiment::ResultRow& row) {
  using experiment::format_double;
  const auto cols = experiment::csv_columns(spec);
  std::ostringstream csv;
  experiment::emit_csv(spec, {row}, csv);
  // Reuse the CSV formatting so `point` and `sweep` agree digit for digit.
  std::string header;
  std::string record;
  std::istringstream lines(csv.str());
  std::getline(lines, header);
  std::getline(lines, record);
  std::istringstream fields(record);
  std::string value;
  for (const auto& col : cols) {
    std::getline(fields, value, ',');
    std::cout << col << '=' << value << '\n';
  }
  if (row.sim) {
    std::cout << "sim_successes=" << row.sim->successes << '\n'
              << "sim_trials=" << row.sim->trials << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wireless PBFT performance laboratory"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write CSV");
  std::string spec_path;
  std::string out_path;
  std::string gnuplot_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::string sim_mode;
  bool fixed_positions = false;
  ModelFlags sweep_flags;
  sweep->add_option("--spec", spec_path, "Experiment configuration file")
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", out_path, "CSV destination (default stdout)");
  sweep->add_option("--gnuplot", gnuplot_path,
                    "Also write a gnuplot script plotting the CSV");
  sweep->add_option("--seed", seed, "Simulator seed");
  sweep->add_option("--trials", trials, "Simulator trials per row (enables simulation)");
  sweep->add_option("--sim-mode", sim_mode, "Simulator link model (iid-link|geometric)")
      ->check(CLI::IsMember({"iid-link", "geometric"}));
  sweep->add_flag("--exploratory-fixed-positions", fixed_positions,
                  "Geometric simulation with one distance per node per trial");
  sweep_flags.add_to(*sweep);

  // point
  auto* point = app.add_subcommand("point", "Evaluate one operating point");
  std::string point_signal = "thz-0.22";
  double point_z = 6.0;
  double point_gamma = 5.0;
  int point_n = 4;
  std::optional<std::int64_t> point_trials;
  std::uint64_t point_seed = 1;
  ModelFlags point_flags;
  point->add_option("--signal", point_signal, "Signal profile name")->capture_default_str();
  point->add_option("--z", point_z, "SNR threshold")->capture_default_str();
  point->add_option("--gamma", point_gamma, "Node density (nodes/m^2)")->capture_default_str();
  point->add_option("--n", point_n, "Node count (3f+1)")->capture_default_str();
  point->add_option("--trials", point_trials, "Also simulate with this many trials");
  point->add_option("--seed", point_seed, "Simulator seed")->capture_default_str();
  point_flags.add_to(*point);

  // active-distance
  auto* active = app.add_subcommand("active-distance",
                                    "Largest link distance meeting the SNR threshold");
  std::string active_signal = "thz-0.22";
  double active_z = 6.0;
  double active_h = 1.0;
  std::string active_unit = "db";
  active->add_option("--signal", active_signal, "Signal profile name")->capture_default_str();
  active->add_option("--z", active_z, "SNR threshold")->capture_default_str();
  active->add_option("--fading-gain", active_h, "Fading power gain h")->capture_default_str();
  active->add_option("--threshold-unit", active_unit, "Unit of --z (db|linear)")
      ->check(CLI::IsMember({"db", "linear"}))
      ->capture_default_str();

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Check analytic consensus rates against the simulator");
  sim::SimConfig validate_config;
  validate_config.trials = 100000;
  validate->add_option("--trials", validate_config.trials, "Trials per check")
      ->capture_default_str();
  validate->add_option("--seed", validate_config.seed, "Simulator seed")
      ->capture_default_str();
  validate->add_option("--threads", validate_config.threads, "Worker threads (0 = all cores)");
  validate->add_option("--confidence", validate_config.confidence_level,
                       "Confidence level of the intervals")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sweep) {
      experiment::ExperimentSpec spec =
          spec_path.empty() ? experiment::ExperimentSpec{} : experiment::load_spec(spec_path);
      sweep_flags.apply(spec);
      if (trials || seed || !sim_mode.empty() || fixed_positions) {
        if (!spec.sim) spec.sim = sim::SimConfig{};
        if (!spec.wants(experiment::Output::sim)) spec.outputs.push_back(experiment::Output::sim);
      }
      if (trials) spec.sim->trials = *trials;
      if (seed) spec.sim->seed = *seed;
      if (sim_mode == "geometric" || fixed_positions) spec.sim->mode = sim::Mode::geometric;
      if (sim_mode == "iid-link") spec.sim->mode = sim::Mode::iid_link;
      spec.fixed_positions = fixed_positions;
      spec.validate();

      const auto rows = experiment::run_sweep(spec);
      if (out_path.empty()) {
        experiment::emit_csv(spec, rows, std::cout);
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open '" + out_path + "' for writing");
        experiment::emit_csv(spec, rows, out);
      }
      if (!gnuplot_path.empty()) {
        std::ofstream script(gnuplot_path);
        if (!script) throw ConfigError("cannot open '" + gnuplot_path + "' for writing");
        experiment::emit_gnuplot(spec, out_path.empty() ? "sweep.csv" : out_path, script);
      }
    } else if (*point) {
      experiment::ExperimentSpec spec;
      point_flags.apply(spec);
      spec.profiles = {require_profile(point_signal)};
      spec.settings = {{point_z, point_gamma}};
      spec.n_values = {point_n};
      if (point_trials) {
        spec.sim = sim::SimConfig{};
        spec.sim->trials = *point_trials;
        spec.outputs.push_back(experiment::Output::sim);
      }
      spec.validate();
      print_point(spec, experiment::evaluate_point(spec, spec.profiles[0],
                                                   spec.settings[0], point_n,
                                                   point_seed));
    } else if (*active) {
      const auto profile = require_profile(active_signal);
      const double z_linear =
          active_unit == "db" ? channel::db_to_linear(active_z) : active_z;
      const double distance = channel::active_distance(profile, z_linear, active_h);
      std::cout << "signal=" << profile.name << '\n'
                << "z_linear=" << experiment::format_double(z_linear) << '\n'
                << "h=" << experiment::format_double(active_h) << '\n'
                << "active_distance_m="
                << experiment::format_double(distance) << '\n';
    } else if (*validate) {
      validate_config.validate();
      bool all_passed = true;
      for (const auto& check : experiment::run_validation(validate_config)) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.label
                  << " expected=" << experiment::format_double(check.expected)
                  << " p_hat=" << experiment::format_double(check.estimate.p_hat)
                  << " ci=[" << experiment::format_double(check.estimate.ci_low)
                  << ", " << experiment::format_double(check.estimate.ci_high)
                  << "]\n";
        all_passed = all_passed && check.passed;
      }
      return all_passed ? kOk : kValidationFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const DomainError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
