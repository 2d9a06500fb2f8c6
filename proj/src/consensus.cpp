#include "wpbft/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wpbft/errors.hpp"
#include "wpbft/numerics.hpp"

namespace wpbft::consensus {

FaultBudget::FaultBudget(int node_count)
    : node_count_(node_count), fault_tolerance_((node_count - 1) / 3) {
  if (!is_valid_node_count(node_count)) {
    throw DomainError("n must equal 3f+1 with n >= 4, got n = " +
                      std::to_string(node_count));
  }
}

bool FaultBudget::is_valid_node_count(int node_count) {
  return node_count >= 4 && (node_count - 1) % 3 == 0;
}

namespace {

void check_ps(double ps) {
  if (!(ps >= 0.0 && ps <= 1.0)) throw DomainError("ps must lie in [0, 1]");
}

/// C(population, failures) (1-ps)^failures ps^(population-failures).
double binomial_term(int population, int failures, double ps) {
  const double log_term = numerics::log_choose(population, failures) +
                          numerics::log_pow(1.0 - ps, failures) +
                          numerics::log_pow(ps, population - failures);
  return std::exp(log_term);
}

/// P(at most `allowed` failures among `population` trials).
double binomial_tail(int population, int allowed, double ps) {
  double sum = 0.0;
  for (int x = 0; x <= std::min(allowed, population); ++x) {
    sum += binomial_term(population, x, ps);
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

double stage_pre_prepare(const FaultBudget& budget, double ps) {
  check_ps(ps);
  return binomial_tail(budget.node_count() - 1, budget.fault_tolerance(), ps);
}

double stage_prepare(const FaultBudget& budget, int i, double ps) {
  check_ps(ps);
  const int f = budget.fault_tolerance();
  if (i < 0 || i > f) throw DomainError("stage_prepare: requires 0 <= i <= f");
  return binomial_tail(budget.node_count() - 1 - i, f - i, ps);
}

double stage_commit(const FaultBudget& budget, int i, int j, double ps) {
  check_ps(ps);
  const int f = budget.fault_tolerance();
  if (i < 0 || j < 0 || i + j > f) {
    throw DomainError("stage_commit: requires i, j >= 0 and i + j <= f");
  }
  return binomial_tail(budget.node_count() - i - j, f - i - j, ps);
}

double stage_reply(const FaultBudget& budget, int i, int j, int k, double ps) {
  check_ps(ps);
  const int f = budget.fault_tolerance();
  if (i < 0 || j < 0 || k < 0 || i + j + k > f) {
    throw DomainError("stage_reply: requires i, j, k >= 0 and i + j + k <= f");
  }
  return binomial_tail(budget.node_count() - i - j - k, f - i - j - k, ps);
}

double consensus_success(const FaultBudget& budget, double ps) {
  check_ps(ps);
  const int n = budget.node_count();
  const int f = budget.fault_tolerance();

  // The inner sums depend on the earlier indices only through their running
  // total, so the nested sum is evaluated inside-out over cumulative failure
  // counts s = 0..f.
  std::vector<double> reply(f + 1);
  for (int s = 0; s <= f; ++s) reply[s] = binomial_tail(n - s, f - s, ps);

  std::vector<double> commit(f + 1);
  for (int s = 0; s <= f; ++s) {
    double sum = 0.0;
    for (int k = 0; k <= f - s; ++k) {
      sum += binomial_term(n - s, k, ps) * reply[s + k];
    }
    commit[s] = sum;
  }

  std::vector<double> prepare(f + 1);
  for (int i = 0; i <= f; ++i) {
    double sum = 0.0;
    for (int j = 0; j <= f - i; ++j) {
      sum += binomial_term(n - 1 - i, j, ps) * commit[i + j];
    }
    prepare[i] = sum;
  }

  double total = 0.0;
  for (int i = 0; i <= f; ++i) {
    total += binomial_term(n - 1, i, ps) * prepare[i];
  }
  return std::clamp(total, 0.0, 1.0);
}

StageReport marginal_stage_rates(const FaultBudget& budget, double ps) {
  return {.pre_prepare = stage_pre_prepare(budget, ps),
          .prepare = stage_prepare(budget, 0, ps),
          .commit = stage_commit(budget, 0, 0, ps),
          .reply = stage_reply(budget, 0, 0, 0, ps),
          .consensus = consensus_success(budget, ps)};
}

}  // namespace wpbft::consensus
