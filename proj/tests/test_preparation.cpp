#include <gtest/gtest.h>

#include "antplan/error.hpp"
#include "antplan/preparation.hpp"
#include "oracles.hpp"
#include "tiny.hpp"

using namespace antplan;
using namespace antplan::testkit;

TEST(Preparation, ScheduleValidation) {
  AnnealSchedule s;
  EXPECT_NO_THROW(s.validate());
  s.iterations = 0;
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.decay = 1.0;
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.t0 = -1.0;
  EXPECT_THROW(s.validate(), Error);
}

TEST(Preparation, CostOfNoChangeIsZero) {
  const WorldState s = line_state();
  EXPECT_EQ(preparation_cost(s, s), Cost::zero());
  EXPECT_TRUE(difference_task(s, s).goal.empty());
}

TEST(Preparation, SingleRelocationByHand) {
  const WorldState s0 = line_state();
  WorldState target = s0;
  target.mutable_object(kBowl).location = kSink;
  // move to table 2, pick 2, move back 2, place 2; clear(table) would drag the
  // cup and the apple along.
  EXPECT_EQ(preparation_cost(s0, target), Cost::from_milli(8000));
  const TaskSpec diff = difference_task(s0, target);
  EXPECT_TRUE(std::binary_search(diff.goal.begin(), diff.goal.end(),
                                 pred(s0.world(), PredicateName::In, "bowl1", "sink")));
  EXPECT_TRUE(std::binary_search(diff.goal.begin(), diff.goal.end(),
                                 pred(s0.world(), PredicateName::In, "cup1", "table")));
}

TEST(Preparation, SkipsStatesWithUnsolvableFutures) {
  const WorldState s0 = stale_coffee_state();
  const World& w = s0.world();
  const TaskDistribution dist{{{TaskSpec({pred(w, PredicateName::FilledWith, "cup1", "coffee"),
                                          pred(w, PredicateName::In, "cup1", "sink")},
                                         "coffee"),
                                1.0}}};
  const OracleEstimator oracle(dist);
  AnnealSchedule schedule;
  schedule.iterations = 300;
  const WorldState p = prepare(s0, oracle, schedule);
  EXPECT_EQ(p.object(0).liquid, 1);
  EXPECT_LE(oracle.estimate(p), oracle.estimate(s0));
}

TEST(Preparation, CostAtMostSumOfSeparateChanges) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = make_tiny(seed);
    const WorldState a = perturb(inst.state, seed);
    const WorldState b = perturb(a, seed + 1000);
    if (!reachable_configuration(inst.state, a) || !reachable_configuration(a, b) ||
        !reachable_configuration(inst.state, b))
      continue;
    const Plan first = task_plan(inst.state, difference_task(inst.state, a));
    const Plan second = task_plan(first.terminal, difference_task(a, b));
    // The two plans in sequence are one way to realize b.
    if (!satisfies(second.terminal, difference_task(inst.state, b))) continue;
    EXPECT_LE(preparation_cost(inst.state, b), first.total_cost + second.total_cost) << "seed " << seed;
    ++checked;
  }
  EXPECT_GT(checked, 3);
}

TEST(Preparation, ReachableConfiguration) {
  const WorldState s0(line_world(), {0, 0}, {{kTable, 1, 1}, {kTable, 0, -1}, {kTable, 0, -1}});
  WorldState t = s0;
  t.mutable_object(kCup) = {kSink, 0, 0};
  EXPECT_TRUE(reachable_configuration(s0, t));
  t.mutable_object(kCup) = {kSink, 1, 0};
  EXPECT_FALSE(reachable_configuration(s0, t));
  t = s0;
  t.mutable_object(kBowl).dirty = 1;
  EXPECT_FALSE(reachable_configuration(s0, t));
}

TEST(Preparation, NeverWorseThanStart) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto inst = make_tiny(seed);
    const OracleEstimator oracle(inst.dist);
    AnnealSchedule sched;
    sched.iterations = 200;
    sched.seed = seed;
    const WorldState p = prepare(inst.state, oracle, sched);
    EXPECT_LE(oracle.estimate(p), oracle.estimate(inst.state));
    EXPECT_TRUE(reachable_configuration(inst.state, p));
    EXPECT_EQ(p.robot_cell(), inst.state.robot_cell());
  }
}

TEST(Preparation, SingleIterationNearZeroTemperatureKeepsImprovementsOnly) {
  const auto inst = make_tiny(5);
  const OracleEstimator oracle(inst.dist);
  AnnealSchedule sched;
  sched.iterations = 1;
  sched.t0 = 1e-12;
  const WorldState p = prepare(inst.state, oracle, sched);
  EXPECT_LE(oracle.estimate(p), oracle.estimate(inst.state));
  if (!(p == inst.state)) {
    EXPECT_LT(oracle.estimate(p), oracle.estimate(inst.state));
  }
}

TEST(Preparation, ZeroEstimatorReturnsStart) {
  const auto inst = make_tiny(6);
  AnnealSchedule sched;
  sched.iterations = 100;
  EXPECT_EQ(prepare(inst.state, ConstantEstimator(0.0), sched), inst.state);
}

TEST(Preparation, DeterministicPerSeed) {
  const auto inst = make_tiny(7);
  const OracleEstimator oracle(inst.dist);
  AnnealSchedule sched;
  sched.iterations = 150;
  sched.seed = 3;
  EXPECT_EQ(prepare(inst.state, oracle, sched), prepare(inst.state, oracle, sched));
  EXPECT_EQ(prepare(inst.state, oracle, sched, 3), prepare(inst.state, oracle, sched, 3));
  EXPECT_THROW(prepare(inst.state, oracle, sched, 0), Error);
}

TEST(Preparation, ChainsNeverWorseThanFirstChain) {
  const auto inst = make_tiny(8);
  const OracleEstimator oracle(inst.dist);
  AnnealSchedule sched;
  sched.iterations = 100;
  sched.seed = 9;
  AnnealSchedule first = sched;
  first.seed = Rng::mix(sched.seed, 0);
  EXPECT_LE(oracle.estimate(prepare(inst.state, oracle, sched, 4)), oracle.estimate(prepare(inst.state, oracle, first)));
}

TEST(Preparation, PreparedCostMatchesReplanning) {
  const auto inst = make_tiny(9);
  const OracleEstimator oracle(inst.dist);
  AnnealSchedule sched;
  sched.iterations = 300;
  const WorldState p = prepare(inst.state, oracle, sched);
  const Cost c = preparation_cost(inst.state, p);
  EXPECT_EQ(c, ucs_cost(inst.state, difference_task(inst.state, p)));
}
