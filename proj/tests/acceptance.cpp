// Acceptance suite: one check per exit criterion, one PASS/FAIL line each.
// Usage: wpbft_acceptance [criterion-number ...]   (no arguments runs all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wpbft/channel.hpp"
#include "wpbft/consensus.hpp"
#include "wpbft/experiment.hpp"
#include "wpbft/latency.hpp"
#include "wpbft/simulator.hpp"

using namespace wpbft;

namespace {

struct Verdict {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) { return experiment::format_double(v); }

const std::vector<experiment::Setting> kSettings = {{6.0, 2.0}, {6.0, 5.0}, {4.0, 5.0}};

// 1. Nested consensus sum against a literal high-precision enumeration.
Verdict analytic_oracle_equivalence() {
  Verdict v;
  const auto start = Clock::now();
  double worst = 0.0;
  for (const auto& [n, ps] : std::vector<std::pair<int, double>>{{4, 0.9}, {7, 0.5}, {7, 0.9}}) {
    const double analytic = consensus::consensus_success(consensus::FaultBudget(n), ps);
    const double exact = oracle::consensus_four_loops(n, ps);
    worst = std::max(worst, std::abs(analytic - exact));
    v.require(std::abs(analytic - exact) <= 1e-12,
              "n=" + std::to_string(n) + " ps=" + fmt(ps) + " differs by " +
                  fmt(std::abs(analytic - exact)));
  }
  const double elapsed = seconds_since(start);
  v.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("max |diff| = ") + fmt(worst) +
              ", " + fmt(elapsed) + " s";
  return v;
}

// 2. Analytic rate inside the simulator's 99% Wilson interval. Uses the
// same default-seeded streams as `wpbft validate`.
Verdict analytic_simulation_agreement() {
  Verdict v;
  const auto start = Clock::now();
  sim::SimConfig config;
  config.trials = 100000;
  config.confidence_level = 0.99;
  int inside = 0;
  int total = 0;
  for (const auto& check : experiment::run_validation(config)) {
    if (check.label.rfind("iid", 0) != 0) continue;
    ++total;
    inside += check.passed;
    v.require(check.passed, check.label + " analytic " + fmt(check.expected) + " outside [" +
                                fmt(check.estimate.ci_low) + ", " +
                                fmt(check.estimate.ci_high) + "]");
  }
  v.require(total == 12, "expected 12 grid points, got " + std::to_string(total));
  const double elapsed = seconds_since(start);
  v.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(inside) + "/" +
              std::to_string(total) + " inside, " + fmt(elapsed) + " s";
  return v;
}

// 3. Quadrature against the alpha = 2 closed form.
Verdict quadrature_correctness() {
  Verdict v;
  std::mt19937_64 gen(31337);
  std::uniform_real_distribution<double> pt(0.1, 10.0), pn(0.01, 2.0), zdb(-10.0, 20.0),
      gamma(0.05, 20.0);
  std::uniform_int_distribution<int> f(1, 33);
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    channel::SignalProfile p = channel::thz_profile();
    p.transmit_power = pt(gen);
    p.noise_power = pn(gen);
    p.path_loss_exponent = 2.0;
    const channel::NetworkGeometry g(3 * f(gen) + 1, gamma(gen), zdb(gen));
    const double closed = oracle::avg_success_alpha2(p.transmit_power, p.noise_power,
                                                     g.snr_threshold_linear(),
                                                     g.radius() * g.radius());
    const double diff = std::abs(channel::avg_success_prob(p, g) - closed);
    worst = std::max(worst, diff);
    v.require(diff <= 1e-8, "draw " + std::to_string(draw) + " differs by " + fmt(diff));
  }
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("max |diff| = ") + fmt(worst);
  return v;
}

// 4. P_s falls with n; lower threshold and higher density help.
Verdict success_probability_trends() {
  Verdict v;
  for (const auto& profile : channel::preset_profiles()) {
    std::vector<std::vector<double>> curves;
    for (const auto& s : kSettings) {
      std::vector<double> curve;
      for (int n = 4; n <= 100; n += 3) {
        curve.push_back(channel::avg_success_prob(profile, channel::NetworkGeometry(n, s.density, s.snr_threshold)));
      }
      for (std::size_t i = 1; i < curve.size(); ++i) {
        v.require(curve[i] < curve[i - 1], profile.name + " z=" + fmt(s.snr_threshold) +
                                               " gamma=" + fmt(s.density) +
                                               " not strictly decreasing at n=" +
                                               std::to_string(4 + 3 * i));
      }
      curves.push_back(std::move(curve));
    }
    // curves: 0 = (6 dB, 2), 1 = (6 dB, 5), 2 = (4 dB, 5)
    for (std::size_t i = 0; i < curves[0].size(); ++i) {
      v.require(curves[2][i] >= curves[1][i] && curves[1][i] >= curves[0][i],
                profile.name + " ordering violated at n=" + std::to_string(4 + 3 * i));
    }
  }
  if (v.passed) v.detail = "2 presets x 3 settings x 33 n";
  return v;
}

// 5. alpha = 2.229 loses to alpha = 1.7 beyond one metre and wins inside it.
Verdict path_loss_exponent_ordering() {
  Verdict v;
  channel::SignalProfile thz = channel::thz_profile();
  channel::SignalProfile mm = channel::mmwave_profile();
  int checked = 0;
  for (double z : {channel::db_to_linear(4.0), channel::db_to_linear(6.0)}) {
    for (double r = 0.01; r <= 20.0; r *= 1.05) {
      if (r == 1.0) continue;
      const double high = channel::link_success_prob(thz, z, r);
      const double low = channel::link_success_prob(mm, z, r);
      const bool power_order = r > 1.0 ? std::pow(r, 2.229) > std::pow(r, 1.7)
                                       : std::pow(r, 2.229) < std::pow(r, 1.7);
      v.require(power_order, "r^alpha ordering at r=" + fmt(r));
      // Past the underflow point both probabilities are exactly 0.
      if (high == 0.0 && low == 0.0) continue;
      ++checked;
      v.require(r > 1.0 ? high < low : high > low, "link ordering at r=" + fmt(r));
    }
  }
  v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(checked) + " distances compared";
  return v;
}

// 6. Delay identities on every sweep row and the share of t1 in t_total.
Verdict delay_identities() {
  Verdict v;
  const experiment::ExperimentSpec spec;
  const auto rows = experiment::run_sweep(spec);
  double min_share = 1.0;
  double max_share = 0.0;
  for (const auto& row : rows) {
    const auto& d = row.delays;
    v.require(d.broadcast_delay == static_cast<double>(row.n - 1) * d.symbol_duration,
              "t1 != (n-1)T at n=" + std::to_string(row.n));
    v.require(d.reply_delay == d.symbol_duration, "t2 != T at n=" + std::to_string(row.n));
    v.require(d.total_delay == 3.0 * d.broadcast_delay + d.reply_delay,
              "t_total != 3 t1 + t2 at n=" + std::to_string(row.n));
    const double share = d.broadcast_delay / d.total_delay;
    min_share = std::min(min_share, share);
    max_share = std::max(max_share, share);
  }
  const bool share_ok = min_share > 0.75 && max_share < 1.0;
  v.require(share_ok, "t1/t_total spans [" + fmt(min_share) + ", " + fmt(max_share) +
                          "], required inside (0.75, 1)");
  v.detail += "; identities checked on " + std::to_string(rows.size()) + " rows";
  return v;
}

// 7. Delay solver residual and the analytic anchor m = 1/4.
Verdict delay_solver() {
  Verdict v;
  double worst = 0.0;
  for (const auto& profile : channel::preset_profiles()) {
    for (double ps = 0.05; ps <= 0.99 + 1e-12; ps += 0.01) {
      const double t = latency::solve_symbol_duration(profile, ps);
      const double residual = std::abs(latency::error_prob_for_duration(profile, t) - (1.0 - ps));
      worst = std::max(worst, residual);
      v.require(residual <= 1e-9, profile.name + " ps=" + fmt(ps) + " residual " + fmt(residual));
    }
  }
  // c - r = 4 with B = 10 GHz, in both unit conventions: the THz preset read as
  // bits per channel use, and a 8 bit/s over 4 bit/s link read as printed.
  auto unit = channel::thz_profile();
  unit.capacity = 8.0;
  unit.rate = 4.0;
  const latency::ErrorModel spectral{latency::LogBase::two,
                                     latency::RateUnits::spectral_efficiency, 1};
  double rel = 0.0;
  for (const auto& [profile, model] :
       {std::pair{channel::thz_profile(), spectral}, std::pair{unit, latency::ErrorModel{}}}) {
    const double t = latency::solve_symbol_duration(profile, 0.5, {}, model);
    const double expected = 0.25 / profile.bandwidth;
    rel = std::max(rel, std::abs(t - expected) / expected);
    for (double ps = 0.05; ps <= 0.99 + 1e-12; ps += 0.01) {
      const double tp = latency::solve_symbol_duration(profile, ps, {}, model);
      const double residual =
          std::abs(latency::error_prob_for_duration(profile, tp, model) - (1.0 - ps));
      worst = std::max(worst, residual);
      v.require(residual <= 1e-9, profile.name + " ps=" + fmt(ps) + " residual " + fmt(residual));
    }
  }
  v.require(rel <= 1e-12, "anchor T relative error " + fmt(rel));
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("max residual ") + fmt(worst) +
              ", anchor rel error " + fmt(rel);
  return v;
}

// 8. mmWave/THz total-delay ratio at matched operating points.
Verdict delay_separation() {
  Verdict v;
  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& s : kSettings) {
    for (int n : {10, 25, 50, 100}) {
      const channel::NetworkGeometry g(n, s.density, s.snr_threshold);
      const double thz = latency::delay_report(channel::thz_profile(), g).total_delay;
      const double mm = latency::delay_report(channel::mmwave_profile(), g).total_delay;
      const double ratio = mm / thz;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      v.require(ratio >= 10.0 && ratio <= 1000.0,
                "z=" + fmt(s.snr_threshold) + " gamma=" + fmt(s.density) + " n=" +
                    std::to_string(n) + " ratio " + fmt(ratio));
    }
  }
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("ratios span [") + fmt(lo) + ", " +
              fmt(hi) + "]";
  return v;
}

// 9. Active distance identity and guaranteed consensus inside it.
Verdict active_distance() {
  Verdict v;
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.01, 50.0), alpha(1.0, 4.0);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    channel::SignalProfile p = channel::thz_profile();
    p.transmit_power = u(gen);
    p.noise_power = u(gen);
    p.path_loss_exponent = alpha(gen);
    const double z = u(gen);
    const double h = u(gen);
    const double r = channel::active_distance(p, z, h);
    const double rel = std::abs(channel::snr(p, h, r) - z) / z;
    worst = std::max(worst, rel);
    v.require(rel <= 1e-12, "draw " + std::to_string(draw) + " relative error " + fmt(rel));
  }

  const auto profile = channel::thz_profile();
  const channel::NetworkGeometry g(31, 0.5, 6.0);
  const double r_star = channel::active_distance(profile, g.snr_threshold_linear(), 1.0);
  sim::SimConfig config;
  config.trials = 10000;
  config.seed = 9;
  const auto est = sim::estimate_consensus_rate(
      config, consensus::FaultBudget(31),
      sim::GeometricLink{.profile = profile,
                         .geometry = g,
                         .fixed_fading = 1.0,
                         .distance_cap = std::nextafter(r_star, 0.0) * (1.0 - 1e-9),
                         .fixed_positions = false});
  v.require(est.successes == est.trials,
            "clamped simulation succeeded " + std::to_string(est.successes) + "/" +
                std::to_string(est.trials));
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("max rel error ") + fmt(worst) +
              ", clamped P_c = " + fmt(est.p_hat) + " (R = " + fmt(g.radius()) +
              " m, r* = " + fmt(r_star) + " m)";
  return v;
}

// 10. Same seed, different worker counts, identical CSV bytes.
Verdict determinism() {
  Verdict v;
  experiment::ExperimentSpec spec;
  spec.sim = sim::SimConfig{.trials = 10000, .seed = 2023};
  spec.outputs.push_back(experiment::Output::sim);
  std::vector<std::string> outputs;
  for (unsigned threads : {1u, 4u, 7u}) {
    spec.threads = threads;
    std::ostringstream csv;
    experiment::emit_csv(spec, experiment::run_sweep(spec), csv);
    outputs.push_back(csv.str());
  }
  v.require(outputs[0] == outputs[1] && outputs[1] == outputs[2],
            "CSV differs between thread counts");
  v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(outputs[0].size()) +
              " bytes identical across 1, 4, 7 workers";
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "analytic-oracle equivalence", analytic_oracle_equivalence},
      {2, "analytic-simulation agreement", analytic_simulation_agreement},
      {3, "quadrature correctness", quadrature_correctness},
      {4, "success probability trends", success_probability_trends},
      {5, "path-loss exponent ordering", path_loss_exponent_ordering},
      {6, "delay identities", delay_identities},
      {7, "delay solver", delay_solver},
      {8, "THz/mmWave delay separation", delay_separation},
      {9, "active distance", active_distance},
      {10, "determinism", determinism},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    Verdict verdict;
    try {
      verdict = c.run();
    } catch (const std::exception& e) {
      verdict.passed = false;
      verdict.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %2d %-32s %s\n", verdict.passed ? "PASS" : "FAIL", c.id, c.name,
                verdict.detail.c_str());
    failures += verdict.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
