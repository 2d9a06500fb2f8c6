#include "wpbft/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "wpbft/errors.hpp"
#include "wpbft/numerics.hpp"

namespace wpbft::sim {

void SimConfig::validate() const {
  if (trials < 1) throw DomainError("sim: trials must be >= 1");
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw DomainError("sim: confidence_level must lie in (0, 1)");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial_index)
    : engine_(splitmix64(splitmix64(seed) ^ trial_index)) {}

double TrialRng::uniform() {
  return static_cast<double>(engine_() >> 11) * kTwoPow53Inv;
}

double TrialRng::uniform_open_closed() {
  return static_cast<double>((engine_() >> 11) + 1) * kTwoPow53Inv;
}

double TrialRng::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * kTwoPow53Inv;
}

double distance_from_uniform(double u, double radius) {
  return radius * std::sqrt(u);
}

double sample_distance(TrialRng& rng, double radius) {
  if (!(radius > 0.0)) throw DomainError("sample_distance: radius must be > 0");
  return distance_from_uniform(rng.uniform_open_closed(), radius);
}

double fading_from_uniform(double u) { return -std::log(u); }

double sample_fading(TrialRng& rng) {
  return fading_from_uniform(rng.uniform_open());
}

namespace {

class LinkSampler {
 public:
  LinkSampler(TrialRng& rng, const LinkModel& link, int node_count)
      : rng_(rng), link_(link) {
    if (const auto* geo = std::get_if<GeometricLink>(&link_)) {
      z_linear_ = geo->geometry.snr_threshold_linear();
      if (geo->fixed_positions) {
        node_distance_.resize(static_cast<std::size_t>(node_count - 1));
        for (auto& d : node_distance_) d = draw_distance(*geo);
      }
    }
  }

  /// One link attempt towards the `receiver`-th member of a stage population.
  bool attempt(int receiver) {
    if (const auto* fixed = std::get_if<FixedLink>(&link_)) {
      return rng_.uniform() < fixed->ps;
    }
    const auto& geo = std::get<GeometricLink>(link_);
    const double distance =
        node_distance_.empty()
            ? draw_distance(geo)
            : node_distance_[static_cast<std::size_t>(receiver) %
                             node_distance_.size()];
    const double gain =
        geo.fixed_fading ? *geo.fixed_fading : sample_fading(rng_);
    return channel::snr(geo.profile, gain, distance) > z_linear_;
  }

 private:
  double draw_distance(const GeometricLink& geo) {
    double d = sample_distance(rng_, geo.geometry.radius());
    if (geo.distance_cap) d = std::min(d, *geo.distance_cap);
    return d;
  }

  TrialRng& rng_;
  const LinkModel& link_;
  double z_linear_ = 0.0;
  std::vector<double> node_distance_;
};

}  // namespace

TrialOutcome run_trial(TrialRng& rng, const consensus::FaultBudget& budget,
                       const LinkModel& link) {
  const int n = budget.node_count();
  const int f = budget.fault_tolerance();
  LinkSampler sampler(rng, link, n);
  TrialOutcome outcome;

  int spent = 0;
  for (int stage = 0; stage < kStageCount; ++stage) {
    // pre-prepare and prepare exclude the primary, commit and reply do not.
    const int population = (stage < 2 ? n - 1 : n) - spent;
    int failures = 0;
    for (int r = 0; r < population; ++r) {
      if (!sampler.attempt(r)) ++failures;
    }
    outcome.failures[static_cast<std::size_t>(stage)] = failures;
    outcome.stages_run = stage + 1;
    spent += failures;
    if (spent > f) return outcome;
  }
  outcome.success = true;
  return outcome;
}

std::pair<double, double> wilson_interval(std::int64_t successes,
                                          std::int64_t trials,
                                          double confidence_level) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw DomainError("wilson_interval: requires 0 <= successes <= trials, trials >= 1");
  }
  const double z = numerics::q_inverse((1.0 - confidence_level) / 2.0);
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double centre = (p + z2 / (2.0 * nt)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  double low = std::clamp(centre - half, 0.0, 1.0);
  double high = std::clamp(centre + half, 0.0, 1.0);
  // Rounding can push an endpoint past p_hat when p_hat is 0 or 1.
  low = std::min(low, p);
  high = std::max(high, p);
  return {low, high};
}

namespace {

struct Tally {
  std::int64_t successes = 0;
  StageHistogram histogram;

  void merge(const Tally& other) {
    successes += other.successes;
    for (std::size_t s = 0; s < histogram.size(); ++s) {
      for (const auto& [count, freq] : other.histogram[s]) {
        histogram[s][count] += freq;
      }
    }
  }
};

Tally run_range(const SimConfig& config, const consensus::FaultBudget& budget,
                const LinkModel& link, std::int64_t begin, std::int64_t end) {
  Tally tally;
  for (std::int64_t t = begin; t < end; ++t) {
    TrialRng rng(config.seed, static_cast<std::uint64_t>(t));
    const TrialOutcome outcome = run_trial(rng, budget, link);
    if (outcome.success) ++tally.successes;
    for (int s = 0; s < outcome.stages_run; ++s) {
      ++tally.histogram[static_cast<std::size_t>(s)]
                       [outcome.failures[static_cast<std::size_t>(s)]];
    }
  }
  return tally;
}

}  // namespace

SimEstimate estimate_consensus_rate(const SimConfig& config,
                                    const consensus::FaultBudget& budget,
                                    const LinkModel& link) {
  config.validate();
  if (const auto* fixed = std::get_if<FixedLink>(&link)) {
    if (!(fixed->ps >= 0.0 && fixed->ps <= 1.0)) {
      throw DomainError("sim: ps must lie in [0, 1]");
    }
  }

  unsigned workers = config.threads != 0 ? config.threads
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::int64_t>(workers, config.trials));

  std::vector<Tally> partial(workers);
  const std::int64_t chunk = config.trials / workers;
  const std::int64_t extra = config.trials % workers;
  auto bounds = [&](unsigned w) {
    const std::int64_t begin = w * chunk + std::min<std::int64_t>(w, extra);
    return std::pair{begin, begin + chunk + (w < extra ? 1 : 0)};
  };

  if (workers == 1) {
    partial[0] = run_range(config, budget, link, 0, config.trials);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const auto [begin, end] = bounds(w);
        partial[w] = run_range(config, budget, link, begin, end);
      });
    }
  }

  Tally total;
  for (const auto& t : partial) total.merge(t);

  SimEstimate estimate;
  estimate.successes = total.successes;
  estimate.trials = config.trials;
  estimate.p_hat = static_cast<double>(total.successes) /
                   static_cast<double>(config.trials);
  std::tie(estimate.ci_low, estimate.ci_high) =
      wilson_interval(total.successes, config.trials, config.confidence_level);
  estimate.stage_failure_histogram = std::move(total.histogram);
  return estimate;
}

}  // namespace wpbft::sim
