#pragma once

#include "wpbft/errors.hpp"

namespace wpbft::consensus {

/// Node count and fault tolerance under n = 3f + 1.
class FaultBudget {
 public:
  /// Throws DomainError unless node_count >= 4 and node_count = 3f + 1.
  explicit FaultBudget(int node_count);

  static bool is_valid_node_count(int node_count);

  int node_count() const { return node_count_; }
  int fault_tolerance() const { return fault_tolerance_; }

 private:
  int node_count_;
  int fault_tolerance_;
};

struct StageReport {
  double pre_prepare = 0.0;
  double prepare = 0.0;
  double commit = 0.0;
  double reply = 0.0;
  double consensus = 0.0;
};

// Each stage is a binomial tail over its receiving population with the
// failure budget left by the earlier stages. Populations: pre-prepare n-1,
// prepare n-1-i, commit n-i-j, reply n-i-j-k.

double stage_pre_prepare(const FaultBudget& budget, double ps);
double stage_prepare(const FaultBudget& budget, int i, double ps);
double stage_commit(const FaultBudget& budget, int i, int j, double ps);
double stage_reply(const FaultBudget& budget, int i, int j, int k, double ps);

/// Probability that all four stages finish within the shared budget f.
double consensus_success(const FaultBudget& budget, double ps);

/// Per-stage rates with zero prior failures, plus consensus_success.
StageReport marginal_stage_rates(const FaultBudget& budget, double ps);

}  // namespace wpbft::consensus
