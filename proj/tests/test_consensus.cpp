#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wpbft/consensus.hpp"

using namespace wpbft;
using namespace wpbft::consensus;

TEST_CASE("FaultBudget enforces n = 3f + 1") {
  const FaultBudget b4(4);
  CHECK(b4.fault_tolerance() == 1);
  CHECK(FaultBudget(100).fault_tolerance() == 33);
  CHECK_THROWS_AS(FaultBudget(5), DomainError);
  CHECK_THROWS_AS(FaultBudget(1), DomainError);
  CHECK_THROWS_AS(FaultBudget(3), DomainError);
  CHECK(FaultBudget::is_valid_node_count(7));
  CHECK_FALSE(FaultBudget::is_valid_node_count(8));
}

TEST_CASE("stage_pre_prepare") {
  const FaultBudget b(4);
  CHECK(stage_pre_prepare(b, 1.0) == 1.0);
  CHECK(stage_pre_prepare(b, 0.0) == 0.0);
  CHECK(stage_pre_prepare(b, 0.9) == doctest::Approx(0.972).epsilon(1e-14));
  CHECK(stage_pre_prepare(b, 0.9) ==
        doctest::Approx(oracle::binomial_cdf(3, 1, 0.9)).epsilon(1e-14));
  CHECK_THROWS_AS(stage_pre_prepare(b, 1.5), DomainError);
}

TEST_CASE("stage_prepare") {
  const FaultBudget b(4);
  CHECK(stage_prepare(b, 0, 1.0) == 1.0);
  CHECK(stage_prepare(b, 1, 1.0) == 1.0);
  CHECK(stage_prepare(b, 1, 0.9) == doctest::Approx(0.81).epsilon(1e-14));
  CHECK(stage_prepare(b, 0, 0.9) == doctest::Approx(0.972).epsilon(1e-14));
  CHECK_THROWS_AS(stage_prepare(b, 2, 0.9), DomainError);
  CHECK_THROWS_AS(stage_prepare(b, -1, 0.9), DomainError);

  // i = f leaves a single term ps^(n-1-f).
  for (int n : {4, 13, 31, 100}) {
    const FaultBudget bn(n);
    const int f = bn.fault_tolerance();
    for (double ps : {0.3, 0.77, 0.95}) {
      CHECK(stage_prepare(bn, f, ps) ==
            doctest::Approx(std::pow(ps, n - 1 - f)).epsilon(1e-13));
    }
  }
}

TEST_CASE("stage_commit and stage_reply") {
  const FaultBudget b(4);
  CHECK(stage_commit(b, 0, 0, 1.0) == 1.0);
  CHECK(stage_commit(b, 0, 0, 0.9) == doctest::Approx(0.9477).epsilon(1e-14));
  CHECK(stage_commit(b, 1, 0, 0.9) == doctest::Approx(0.729).epsilon(1e-14));
  CHECK(stage_commit(b, 0, 1, 0.9) == doctest::Approx(0.729).epsilon(1e-14));
  CHECK_THROWS_AS(stage_commit(b, 1, 1, 0.9), DomainError);

  CHECK(stage_reply(b, 0, 0, 0, 1.0) == 1.0);
  CHECK(stage_reply(b, 0, 0, 0, 0.9) == doctest::Approx(0.9477).epsilon(1e-14));
  CHECK(stage_reply(b, 0, 0, 1, 0.9) == doctest::Approx(0.729).epsilon(1e-14));
  CHECK(stage_reply(b, 1, 0, 0, 0.9) == doctest::Approx(0.729).epsilon(1e-14));
  CHECK_THROWS_AS(stage_reply(b, 0, 1, 1, 0.9), DomainError);
}

TEST_CASE("consensus_success anchors") {
  const FaultBudget b(4);
  CHECK(consensus_success(b, 1.0) == 1.0);
  CHECK(consensus_success(b, 0.0) == 0.0);
  // Exact rational evaluation of the nested sum gives 0.64216108313217.
  CHECK(consensus_success(b, 0.9) == doctest::Approx(0.64216108313217).epsilon(1e-13));
  CHECK(consensus_success(FaultBudget(7), 0.9) ==
        doctest::Approx(0.5968968184472073).epsilon(1e-13));
  CHECK(consensus_success(FaultBudget(7), 0.5) ==
        doctest::Approx(5.571544170379639e-05).epsilon(1e-12));
  CHECK(consensus_success(FaultBudget(100), 0.0) == 0.0);
  CHECK(consensus_success(FaultBudget(100), 1.0) == 1.0);
}

TEST_CASE("consensus_success matches the literal four-loop oracle") {
  for (int n : {4, 7, 10, 13, 22}) {
    for (double ps : {0.05, 0.3, 0.5, 0.8, 0.9, 0.99}) {
      CAPTURE(n);
      CAPTURE(ps);
      CHECK(std::abs(consensus_success(FaultBudget(n), ps) -
                     oracle::consensus_four_loops(n, ps)) <= 1e-12);
    }
  }
}

TEST_CASE("stage rates are non-decreasing in ps and bound the consensus rate") {
  for (int n : {4, 13, 31, 100}) {
    const FaultBudget b(n);
    StageReport prev = marginal_stage_rates(b, 0.0);
    for (int step = 1; step <= 20; ++step) {
      const double ps = step * 0.05;
      const StageReport r = marginal_stage_rates(b, ps);
      CAPTURE(n);
      CAPTURE(ps);
      CHECK(r.pre_prepare >= prev.pre_prepare);
      CHECK(r.prepare >= prev.prepare);
      CHECK(r.commit >= prev.commit);
      CHECK(r.reply >= prev.reply);
      CHECK(r.consensus >= prev.consensus);
      CHECK(r.consensus <= r.pre_prepare);
      for (double v : {r.pre_prepare, r.prepare, r.commit, r.reply, r.consensus}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      prev = r;
    }
  }
}

TEST_CASE("marginal_stage_rates") {
  const FaultBudget b(4);
  const StageReport r = marginal_stage_rates(b, 0.9);
  CHECK(r.pre_prepare == doctest::Approx(0.972).epsilon(1e-14));
  CHECK(r.prepare == doctest::Approx(0.972).epsilon(1e-14));
  CHECK(r.commit == doctest::Approx(0.9477).epsilon(1e-14));
  CHECK(r.reply == doctest::Approx(0.9477).epsilon(1e-14));
  CHECK(r.consensus == doctest::Approx(0.64216108313217).epsilon(1e-13));

  const StageReport one = marginal_stage_rates(b, 1.0);
  CHECK(one.pre_prepare == 1.0);
  CHECK(one.prepare == 1.0);
  CHECK(one.commit == 1.0);
  CHECK(one.reply == 1.0);
  CHECK(one.consensus == 1.0);

  const StageReport zero = marginal_stage_rates(b, 0.0);
  CHECK(zero.pre_prepare == 0.0);
  CHECK(zero.prepare == 0.0);
  CHECK(zero.commit == 0.0);
  CHECK(zero.reply == 0.0);
  CHECK(zero.consensus == 0.0);
}
