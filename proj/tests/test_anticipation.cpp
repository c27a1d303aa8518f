#include <gtest/gtest.h>

#include "antplan/anticipation.hpp"
#include "antplan/error.hpp"
#include "oracles.hpp"
#include "tiny.hpp"

using namespace antplan;
using namespace antplan::testkit;

namespace {

/// Dirty cup in the sink; the task puts it on the table and the only future
/// task wants it filled with water.
struct JarScenario {
  WorldState s0 = WorldState(line_world(), {0, 0}, {{kSink, 1, -1}, {kTable, 0, -1}, {kTable, 0, -1}});
  TaskSpec task = TaskSpec({pred(s0.world(), PredicateName::In, "cup1", "table")}, "set cup");
  TaskDistribution dist{{{TaskSpec({pred(s0.world(), PredicateName::FilledWith, "cup1", "water")}, "water"), 1.0}}};
};

}  // namespace

TEST(Anticipation, ExactCostIsWeightedSum) {
  const auto inst = make_tiny(11);
  double expected = 0.0;
  for (const auto& e : inst.dist.entries) expected += e.weight * ucs_cost(inst.state, e.task).units();
  EXPECT_NEAR(anticipatory_cost_exact(inst.state, inst.dist), expected, 1e-9);
}

TEST(Anticipation, ExactCostIsLinearInTheDistribution) {
  const auto a = make_tiny(12);
  TaskDistribution p{{a.dist.entries[0]}}, q{{a.dist.entries.back()}};
  p.entries[0].weight = 1.0;
  q.entries[0].weight = 1.0;
  TaskDistribution mix{{{p.entries[0].task, 0.25}, {q.entries[0].task, 0.75}}};
  EXPECT_NEAR(anticipatory_cost_exact(a.state, mix),
              0.25 * anticipatory_cost_exact(a.state, p) + 0.75 * anticipatory_cost_exact(a.state, q), 1e-9);
}

TEST(Anticipation, SatisfiedDistributionCostsNothing) {
  const WorldState s = line_state();
  TaskDistribution d{{{TaskSpec({}, "none"), 1.0}}};
  EXPECT_EQ(anticipatory_cost_exact(s, d), 0.0);
}

TEST(Anticipation, UnsolvableEntryIsNamed) {
  const WorldState s = line_state();
  const World& w = s.world();
  TaskDistribution d{{{TaskSpec({}, "fine"), 0.5}, {TaskSpec({pred(w, PredicateName::Dirty, "cup1")}, "soil"), 0.5}}};
  try {
    anticipatory_cost_exact(s, d);
    FAIL();
  } catch (const UnsolvableTask& e) {
    EXPECT_EQ(e.entry(), 1u);
    EXPECT_NE(std::string(e.what()).find("soil"), std::string::npos);
  }
}

TEST(Anticipation, MemoMatchesUncachedOracle) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto inst = make_tiny(seed);
    const OracleEstimator cached(inst.dist), plain(inst.dist, {}, false);
    WorldState s = inst.state;
    for (int step = 0; step < 25; ++step) {
      EXPECT_EQ(cached.estimate(s), plain.estimate(s));
      EXPECT_EQ(cached.estimate(s), anticipatory_cost_exact(s, inst.dist));
      s = perturb(s, seed * 100 + step);
    }
    EXPECT_GT(cached.cache_size(), 0u);
    EXPECT_EQ(plain.cache_size(), 0u);
  }
}

TEST(Anticipation, ZeroEstimatorReturnsTheOptimalPlan) {
  const ConstantEstimator zero(0.0);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto inst = make_tiny(seed);
    const TaskSpec& task = inst.dist.entries[0].task;
    AnticipationOptions opt;
    opt.seed = seed;
    const Candidate c = anticipatory_plan(inst.state, task, zero, opt);
    EXPECT_EQ(c.plan.total_cost, ucs_cost(inst.state, task));
    EXPECT_FALSE(c.augmentation.has_value());
  }
}

TEST(Anticipation, NeverWorseThanMyopic) {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const auto inst = make_tiny(seed);
    const OracleEstimator oracle(inst.dist);
    for (const auto& e : inst.dist.entries) {
      AnticipationOptions opt;
      opt.seed = seed;
      const Candidate my = myopic_candidate(inst.state, e.task, oracle);
      const Candidate ap = anticipatory_plan(inst.state, e.task, oracle, opt);
      EXPECT_LE(ap.total, my.total);
      EXPECT_TRUE(satisfies(ap.plan.terminal, e.task));
      EXPECT_DOUBLE_EQ(ap.total, ap.immediate + ap.anticipatory);
    }
  }
}

TEST(Anticipation, JarIsWashedAndFilledOnTheWay) {
  const JarScenario sc;
  const OracleEstimator oracle(sc.dist);
  const Candidate my = myopic_candidate(sc.s0, sc.task, oracle);
  EXPECT_EQ(my.plan.terminal.object(kCup).dirty, 1);
  for (bool exhaustive : {false, true}) {
    AnticipationOptions opt;
    opt.exhaustive = exhaustive;
    const Candidate ap = anticipatory_plan(sc.s0, sc.task, oracle, opt);
    EXPECT_LT(ap.total, my.total);
    EXPECT_GT(ap.immediate, my.immediate);
    EXPECT_EQ(ap.plan.terminal.object(kCup).dirty, 0);
    ASSERT_TRUE(ap.augmentation.has_value());
  }
  AnticipationOptions opt;
  opt.exhaustive = true;
  const Candidate ap = anticipatory_plan(sc.s0, sc.task, oracle, opt);
  // Washing now costs 5 and saves the walk back: 11 + 8 against 6 + 17.
  EXPECT_DOUBLE_EQ(ap.total, 19.0);
  EXPECT_NEAR(round6(ap.total), round6(brute_force_anticipatory(sc.s0, sc.task, sc.dist)), 1e-9);
}

TEST(Anticipation, UnsolvableFuturesAreDropped) {
  const WorldState s = stale_coffee_state();
  const World& w = s.world();
  const TaskDistribution dist{{{TaskSpec({pred(w, PredicateName::FilledWith, "cup1", "coffee")}, "coffee"), 1.0}}};
  const OracleEstimator oracle(dist);
  const TaskSpec task({pred(w, PredicateName::In, "cup1", "sink")}, "fetch");
  const AugmentedTask wash{task, {pred(w, PredicateName::Clean, "cup1")}};
  EXPECT_TRUE(filter_augmented_tasks({wash}, s, oracle, 100.0).empty());
  AnticipationOptions opt;
  opt.exhaustive = true;
  const Candidate c = anticipatory_plan(s, task, oracle, opt);
  EXPECT_EQ(c.plan.terminal.object(0).liquid, 1);
  EXPECT_EQ(round6(c.total), round6(brute_force_anticipatory(s, task, dist)));
}

TEST(Anticipation, ExhaustiveMatchesBruteForce) {
  for (std::uint64_t seed = 40; seed < 46; ++seed) {
    const auto inst = make_tiny(seed);
    const OracleEstimator oracle(inst.dist);
    AnticipationOptions opt;
    opt.exhaustive = true;
    const TaskSpec& task = inst.dist.entries[0].task;
    const Candidate ap = anticipatory_plan(inst.state, task, oracle, opt);
    EXPECT_EQ(round6(ap.total), round6(brute_force_anticipatory(inst.state, task, inst.dist))) << "seed " << seed;
  }
}

TEST(Anticipation, ImposeSemantics) {
  const WorldState s(line_world(), {0, 0}, {{kTable, 1, 1}, {kTable, 1, -1}, {kTable, 0, -1}});
  const World& w = s.world();
  const WorldState a = impose(s, {pred(w, PredicateName::Clean, "cup1")});
  EXPECT_EQ(a.object(kCup), (ObjectState{kTable, 0, -1}));
  const WorldState b = impose(s, {pred(w, PredicateName::FilledWith, "cup1", "water")});
  EXPECT_EQ(b.object(kCup), (ObjectState{kTable, 0, 0}));
  const WorldState c = impose(s, {pred(w, PredicateName::Empty, "table")});
  EXPECT_EQ(c.count_in(kTable), 0);
  EXPECT_EQ(c.count_in(w.disposal_slot()), 3);
  const WorldState clean_full(line_world(), {0, 0}, {{kTable, 0, 1}, {kTable, 0, -1}, {kTable, 0, -1}});
  EXPECT_EQ(impose(clean_full, {pred(w, PredicateName::Clean, "cup1")}), clean_full);
  EXPECT_THROW(impose(s, {pred(w, PredicateName::Clean, "apple1")}), Error);
  EXPECT_THROW(impose(s, {pred(w, PredicateName::In, "cup1", "sink"), pred(w, PredicateName::In, "cup1", "table")}),
               Error);
}

TEST(Anticipation, SampledAugmentationsRespectTheContract) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = make_tiny(seed);
    const TaskSpec& task = inst.dist.entries[0].task;
    const Plan myopic = task_plan(inst.state, task);
    const auto a = sample_augmented_tasks(inst.state, task, myopic, 5, seed);
    EXPECT_EQ(a.size(), sample_augmented_tasks(inst.state, task, myopic, 5, seed).size());
    EXPECT_LE(a.size(), 5u);
    for (const auto& aug : a) {
      ASSERT_FALSE(aug.added.empty());
      for (const Predicate& p : aug.added) {
        EXPECT_FALSE(std::binary_search(task.goal.begin(), task.goal.end(), p));
        EXPECT_FALSE(myopic.terminal.holds(p) && aug.added.size() == 1);
      }
    }
  }
  EXPECT_THROW(sample_augmented_tasks(line_state(), TaskSpec({}, "x"), task_plan(line_state(), TaskSpec({}, "x")), -1, 0),
               Error);
}

TEST(Anticipation, FilterKeepsOnlyStrictImprovements) {
  const JarScenario sc;
  const OracleEstimator oracle(sc.dist);
  const Plan myopic = task_plan(sc.s0, sc.task);
  const double baseline = oracle.estimate(myopic.terminal);
  const auto pool = exhaustive_augmentations(sc.s0, sc.task);
  const auto kept = filter_augmented_tasks(pool, myopic.terminal, oracle, baseline);
  EXPECT_FALSE(kept.empty());
  EXPECT_LT(kept.size(), pool.size());
  for (const auto& k : kept) EXPECT_LT(oracle.estimate(impose(myopic.terminal, k.added)), baseline);
  EXPECT_TRUE(filter_augmented_tasks(pool, myopic.terminal, oracle, 0.0).empty());
}

TEST(Anticipation, ExhaustiveDescriptionsSatisfyTheTask) {
  const auto inst = make_tiny(3);
  const TaskSpec& task = inst.dist.entries[0].task;
  for (const auto& aug : exhaustive_augmentations(inst.state, task)) {
    const WorldState s = impose(inst.state, aug.combined().goal);
    EXPECT_TRUE(satisfies(s, task));
  }
}
