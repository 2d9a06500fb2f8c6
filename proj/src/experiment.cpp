#include "wpbft/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "wpbft/errors.hpp"

namespace wpbft::experiment {

std::vector<int> ExperimentSpec::default_n_values() {
  std::vector<int> values;
  for (int n = 4; n <= 100; n += 3) values.push_back(n);
  return values;
}

void ExperimentSpec::validate() const {
  if (profiles.empty()) throw ConfigError("profiles: at least one profile is required");
  for (const auto& p : profiles) {
    try {
      p.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("profiles: ") + e.what());
    }
    if (p.name.find_first_of(",\"\n") != std::string::npos) {
      throw ConfigError("profiles: name '" + p.name + "' is not CSV-safe");
    }
  }
  if (settings.empty()) throw ConfigError("settings: at least one setting is required");
  for (const auto& s : settings) {
    if (!(s.density > 0.0)) {
      throw ConfigError("settings: density must be > 0, got " + format_double(s.density));
    }
    if (threshold_unit == ThresholdUnit::linear && !(s.snr_threshold >= 0.0)) {
      throw ConfigError("settings: linear threshold must be >= 0, got " +
                        format_double(s.snr_threshold));
    }
  }
  if (n_values.empty()) throw ConfigError("n_values: at least one n is required");
  for (int n : n_values) {
    if (!consensus::FaultBudget::is_valid_node_count(n)) {
      throw ConfigError("n_values: n must equal 3f+1 (n >= 4), got " +
                        std::to_string(n));
    }
  }
  if (sim) {
    try {
      sim->validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
}

bool ExperimentSpec::wants(Output output) const {
  return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
}

double ExperimentSpec::threshold_db(const Setting& setting) const {
  return threshold_unit == ThresholdUnit::db
             ? setting.snr_threshold
             : channel::linear_to_db(setting.snr_threshold);
}

namespace {

std::uint64_t row_seed(std::uint64_t seed, std::size_t row) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (row + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

ResultRow evaluate_point(const ExperimentSpec& spec,
                         const channel::SignalProfile& profile,
                         const Setting& setting, int n,
                         std::uint64_t sim_seed) {
  const consensus::FaultBudget budget(n);
  const channel::NetworkGeometry geometry(n, setting.density,
                                          spec.threshold_db(setting));
  ResultRow row;
  row.signal = profile.name;
  row.z_db = geometry.snr_threshold_db();
  row.gamma = setting.density;
  row.n = n;
  row.f = budget.fault_tolerance();
  row.ps = channel::avg_success_prob(profile, geometry, spec.tolerance);
  if (spec.wants(Output::stages) || spec.wants(Output::consensus)) {
    row.stages = consensus::marginal_stage_rates(budget, row.ps);
  }
  if (spec.wants(Output::delays)) {
    if (row.ps >= 1.0 || row.ps <= 0.0) {
      throw DomainError("delays undefined for ps = " + format_double(row.ps) +
                        " (" + profile.name + ", n = " + std::to_string(n) + ")");
    }
    row.delays = latency::make_delay_report(
        latency::solve_symbol_duration(profile, row.ps, spec.tolerance,
                                       spec.error_model),
        n);
  }
  if (spec.wants(Output::sim)) {
    sim::SimConfig config = spec.sim.value_or(sim::SimConfig{});
    config.seed = sim_seed;
    config.threads = 1;
    sim::LinkModel link = sim::FixedLink{row.ps};
    if (config.mode == sim::Mode::geometric) {
      link = sim::GeometricLink{.profile = profile,
                                .geometry = geometry,
                                .fixed_fading = std::nullopt,
                                .distance_cap = std::nullopt,
                                .fixed_positions = spec.fixed_positions};
    }
    row.sim = sim::estimate_consensus_rate(config, budget, link);
  }
  return row;
}

std::vector<ResultRow> run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  struct Task {
    const channel::SignalProfile* profile;
    const Setting* setting;
    int n;
  };
  std::vector<Task> tasks;
  for (const auto& p : spec.profiles) {
    for (const auto& s : spec.settings) {
      for (int n : spec.n_values) tasks.push_back({&p, &s, n});
    }
  }

  const std::uint64_t seed = spec.sim ? spec.sim->seed : sim::SimConfig{}.seed;
  std::vector<ResultRow> rows(tasks.size());
  auto run_task = [&](std::size_t i) {
    rows[i] = evaluate_point(spec, *tasks[i].profile, *tasks[i].setting,
                             tasks[i].n, row_seed(seed, i));
  };

  unsigned workers = spec.threads != 0
                         ? spec.threads
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, tasks.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(i);
        } catch (...) {
          errors[w] = std::current_exception();
          next = tasks.size();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::vector<ValidationCheck> run_validation(const sim::SimConfig& config) {
  std::vector<ValidationCheck> checks;
  std::uint64_t stream = 0;
  for (int n : {4, 7, 10, 13}) {
    const consensus::FaultBudget budget(n);
    for (double ps : {0.8, 0.9, 0.95}) {
      sim::SimConfig c = config;
      c.seed = row_seed(config.seed, stream++);
      ValidationCheck check;
      check.label = "iid n=" + std::to_string(n) + " ps=" + format_double(ps);
      check.expected = consensus::consensus_success(budget, ps);
      check.estimate = sim::estimate_consensus_rate(c, budget, sim::FixedLink{ps});
      check.passed = check.estimate.ci_low <= check.expected &&
                     check.expected <= check.estimate.ci_high;
      checks.push_back(std::move(check));
    }
  }
  for (const auto& profile : channel::preset_profiles()) {
    for (int n : {4, 10}) {
      const consensus::FaultBudget budget(n);
      const channel::NetworkGeometry geometry(n, 5.0, 6.0);
      const double ps = channel::avg_success_prob(profile, geometry);
      sim::SimConfig c = config;
      c.seed = row_seed(config.seed, stream++);
      c.mode = sim::Mode::geometric;
      const auto geometric = sim::estimate_consensus_rate(
          c, budget, sim::GeometricLink{.profile = profile,
                                    .geometry = geometry,
                                    .fixed_fading = std::nullopt,
                                    .distance_cap = std::nullopt,
                                    .fixed_positions = false});
      c.seed = row_seed(config.seed, stream++);
      c.mode = sim::Mode::iid_link;
      const auto iid = sim::estimate_consensus_rate(c, budget, sim::FixedLink{ps});
      ValidationCheck check;
      check.label = "geometric " + profile.name + " n=" + std::to_string(n);
      check.expected = iid.p_hat;
      check.estimate = geometric;
      check.passed = geometric.ci_low <= iid.ci_high && iid.ci_low <= geometric.ci_high;
      checks.push_back(std::move(check));
    }
  }
  return checks;
}

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) {
      throw ConfigError("empty list element in '" + text + "'");
    }
    items.push_back(item.substr(first, last - first + 1));
  }
  return items;
}

template <typename T>
T parse_number(const std::string& text, const std::string& field) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(field + ": cannot parse '" + text + "' as a number");
  }
  return value;
}

class SectionReader {
 public:
  SectionReader(const pt::ptree& tree, std::string section)
      : tree_(tree), section_(std::move(section)) {}

  std::string field(const std::string& key) const { return section_ + "." + key; }

  std::optional<std::string> get(const std::string& key) {
    seen_.push_back(key);
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'))) {
      return *v;
    }
    return std::nullopt;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : tree_) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ConfigError(field(key) + ": unknown key");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::string section_;
  std::vector<std::string> seen_;
};

void read_profiles(SectionReader& r, ExperimentSpec& spec) {
  if (auto names = r.get("names")) {
    spec.profiles.clear();
    for (const auto& name : split_list(*names)) {
      auto profile = channel::find_preset(name);
      if (!profile) throw ConfigError(r.field("names") + ": unknown profile '" + name + "'");
      spec.profiles.push_back(*profile);
    }
  }
}

void read_settings(SectionReader& r, ExperimentSpec& spec) {
  if (auto unit = r.get("threshold_unit")) {
    if (*unit == "db") {
      spec.threshold_unit = ThresholdUnit::db;
    } else if (*unit == "linear") {
      spec.threshold_unit = ThresholdUnit::linear;
    } else {
      throw ConfigError(r.field("threshold_unit") + ": expected db or linear, got '" +
                        *unit + "'");
    }
  }
  if (auto pairs = r.get("pairs")) {
    spec.settings.clear();
    for (const auto& pair : split_list(*pairs)) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) {
        throw ConfigError(r.field("pairs") + ": expected z:gamma, got '" + pair + "'");
      }
      spec.settings.push_back(
          {parse_number<double>(pair.substr(0, colon), r.field("pairs")),
           parse_number<double>(pair.substr(colon + 1), r.field("pairs"))});
    }
  }
}

void read_n_values(SectionReader& r, ExperimentSpec& spec) {
  auto values = r.get("values");
  auto range = r.get("range");
  if (values && range) {
    throw ConfigError(r.field("values") + ": give either values or range, not both");
  }
  if (values) {
    spec.n_values.clear();
    for (const auto& v : split_list(*values)) {
      spec.n_values.push_back(parse_number<int>(v, r.field("values")));
    }
  }
  if (range) {
    std::vector<int> parts;
    std::istringstream in(*range);
    std::string part;
    while (std::getline(in, part, ':')) {
      parts.push_back(parse_number<int>(part, r.field("range")));
    }
    if (parts.size() != 3 || parts[2] <= 0 || parts[0] > parts[1]) {
      throw ConfigError(r.field("range") + ": expected first:last:step, got '" +
                        *range + "'");
    }
    spec.n_values.clear();
    for (int n = parts[0]; n <= parts[1]; n += parts[2]) spec.n_values.push_back(n);
  }
}

void read_sim(SectionReader& r, ExperimentSpec& spec) {
  sim::SimConfig config;
  if (auto v = r.get("trials")) config.trials = parse_number<std::int64_t>(*v, r.field("trials"));
  if (auto v = r.get("seed")) config.seed = parse_number<std::uint64_t>(*v, r.field("seed"));
  if (auto v = r.get("confidence")) {
    config.confidence_level = parse_number<double>(*v, r.field("confidence"));
  }
  if (auto v = r.get("mode")) {
    if (*v == "iid-link") {
      config.mode = sim::Mode::iid_link;
    } else if (*v == "geometric") {
      config.mode = sim::Mode::geometric;
    } else {
      throw ConfigError(r.field("mode") + ": expected iid-link or geometric, got '" + *v + "'");
    }
  }
  spec.sim = config;
}

void read_outputs(SectionReader& r, ExperimentSpec& spec) {
  if (auto include = r.get("include")) {
    spec.outputs.clear();
    for (const auto& name : split_list(*include)) {
      if (name == "ps") {
        spec.outputs.push_back(Output::ps);
      } else if (name == "stages") {
        spec.outputs.push_back(Output::stages);
      } else if (name == "consensus") {
        spec.outputs.push_back(Output::consensus);
      } else if (name == "delays") {
        spec.outputs.push_back(Output::delays);
      } else if (name == "sim") {
        spec.outputs.push_back(Output::sim);
      } else {
        throw ConfigError(r.field("include") + ": unknown output '" + name + "'");
      }
    }
  }
}

void read_model(SectionReader& r, ExperimentSpec& spec) {
  if (auto v = r.get("log_base")) {
    if (*v == "2") {
      spec.error_model.log_base = latency::LogBase::two;
    } else if (*v == "e") {
      spec.error_model.log_base = latency::LogBase::e;
    } else if (*v == "10") {
      spec.error_model.log_base = latency::LogBase::ten;
    } else {
      throw ConfigError(r.field("log_base") + ": expected 2, e or 10, got '" + *v + "'");
    }
  }
  if (auto v = r.get("rate_units")) {
    if (*v == "spectral") {
      spec.error_model.units = latency::RateUnits::spectral_efficiency;
    } else if (*v == "raw") {
      spec.error_model.units = latency::RateUnits::raw_bits_per_second;
    } else {
      throw ConfigError(r.field("rate_units") + ": expected spectral or raw, got '" + *v + "'");
    }
  }
}

}  // namespace

ExperimentSpec parse_spec(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentSpec spec;
  bool outputs_given = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(source + ": key '" + section + "' outside any section");
    }
    SectionReader reader(body, section);
    try {
      if (section == "profiles") {
        read_profiles(reader, spec);
      } else if (section == "settings") {
        read_settings(reader, spec);
      } else if (section == "n_values") {
        read_n_values(reader, spec);
      } else if (section == "sim") {
        read_sim(reader, spec);
      } else if (section == "outputs") {
        read_outputs(reader, spec);
        outputs_given = true;
      } else if (section == "model") {
        read_model(reader, spec);
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
      reader.reject_unknown();
    } catch (const ConfigError& e) {
      throw ConfigError(source + ": " + e.what());
    }
  }
  if (spec.sim && !outputs_given) spec.outputs.push_back(Output::sim);
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  return parse_spec(in, path.string());
}

std::vector<std::string> csv_columns(const ExperimentSpec& spec) {
  std::vector<std::string> cols = {"signal", "z_db", "gamma", "n", "f"};
  if (spec.wants(Output::ps)) cols.push_back("ps");
  if (spec.wants(Output::stages)) {
    cols.insert(cols.end(), {"p_pre_prepare", "p_prepare", "p_commit", "p_reply"});
  }
  if (spec.wants(Output::consensus)) cols.push_back("p_consensus");
  if (spec.wants(Output::delays)) {
    cols.insert(cols.end(), {"T_s", "t1_s", "t2_s", "t_total_s"});
  }
  if (spec.wants(Output::sim)) {
    cols.insert(cols.end(), {"sim_p_hat", "sim_ci_low", "sim_ci_high"});
  }
  return cols;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void emit_csv(const ExperimentSpec& spec, const std::vector<ResultRow>& rows,
              std::ostream& out) {
  const auto cols = csv_columns(spec);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& row : rows) {
    std::vector<std::string> fields = {row.signal, format_double(row.z_db),
                                       format_double(row.gamma),
                                       std::to_string(row.n), std::to_string(row.f)};
    if (spec.wants(Output::ps)) fields.push_back(format_double(row.ps));
    if (spec.wants(Output::stages)) {
      for (double v : {row.stages.pre_prepare, row.stages.prepare,
                       row.stages.commit, row.stages.reply}) {
        fields.push_back(format_double(v));
      }
    }
    if (spec.wants(Output::consensus)) fields.push_back(format_double(row.stages.consensus));
    if (spec.wants(Output::delays)) {
      for (double v : {row.delays.symbol_duration, row.delays.broadcast_delay,
                       row.delays.reply_delay, row.delays.total_delay}) {
        fields.push_back(format_double(v));
      }
    }
    if (spec.wants(Output::sim)) {
      const sim::SimEstimate est = row.sim.value_or(sim::SimEstimate{});
      for (double v : {est.p_hat, est.ci_low, est.ci_high}) {
        fields.push_back(format_double(v));
      }
    }
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  }
  if (!out) throw std::ios_base::failure("emit_csv: write failed");
}

void emit_gnuplot(const ExperimentSpec& spec, const std::string& csv_path,
                  std::ostream& out) {
  const auto cols = csv_columns(spec);
  out << "set datafile separator ','\n"
      << "set key outside\n"
      << "set xlabel 'n'\n"
      << "set terminal pngcairo size 900,600\n";
  // One curve per (signal, setting) block; rows are grouped so `every`
  // slices contiguous runs of n.
  const std::size_t per_curve = spec.n_values.size();
  const std::size_t curves = spec.profiles.size() * spec.settings.size();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::string& name = cols[c];
    if (c < 5) continue;
    out << "set output '" << name << ".png'\n"
        << "set ylabel '" << name << "'\n"
        << "plot ";
    for (std::size_t k = 0; k < curves; ++k) {
      const auto& profile = spec.profiles[k / spec.settings.size()];
      const auto& setting = spec.settings[k % spec.settings.size()];
      const std::size_t first = k * per_curve;
      out << (k ? ", \\\n     " : "") << "'" << csv_path << "' skip 1 every ::"
          << first << "::" << first + per_curve - 1 << " using 4:" << c + 1
          << " with linespoints title '" << profile.name << " z="
          << format_double(spec.threshold_db(setting)) << "dB gamma="
          << format_double(setting.density) << "'";
    }
    out << "\n";
  }
}

}  // namespace wpbft::experiment
