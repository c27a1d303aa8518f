#include <gtest/gtest.h>

#include "antplan/error.hpp"
#include "antplan/planner.hpp"
#include "oracles.hpp"
#include "tiny.hpp"

using namespace antplan;
using namespace antplan::testkit;

namespace {

/// Sink at (0,0) and table at (2,0): out of reach of each other.
WorldState two_container_state() {
  const auto grid = OccupancyGrid::from_rows({"..."});
  std::vector<Entity> e{Entity{"robot", "robot", EntityKind::Robot, Cell{0, 0}, {}, {}},
                        container_entity("sink", "sink", {0, 0}), container_entity("table", "table", {2, 0}),
                        object_entity("bowl1", "bowl")};
  return WorldState(std::make_shared<const World>(grid, e, Profile::Restaurant), {0, 0}, {{1, 0, -1}});
}

}  // namespace

TEST(Planner, HandComputedRelocation) {
  const WorldState s = two_container_state();
  const World& w = s.world();
  const Plan plan = task_plan(s, TaskSpec({pred(w, PredicateName::In, "bowl1", "sink")}, "fetch"));
  // move 2 + clear 3 beats move 2 + pick 2 + move 2 + place 2
  EXPECT_EQ(plan.total_cost, Cost::from_milli(5000));
  ASSERT_EQ(plan.actions.size(), 2u);
  EXPECT_EQ(plan.actions[0].name, ActionName::Move);
  EXPECT_EQ(plan.actions[1].name, ActionName::Clear);
  EXPECT_TRUE(plan.optimal);
  const Plan back = task_plan(plan.terminal, TaskSpec({pred(w, PredicateName::In, "bowl1", "table")}, "return"));
  // move 2 + pick 2 + move 2 + place 2
  EXPECT_EQ(back.total_cost, Cost::from_milli(8000));
}

TEST(Planner, SatisfiedGoalIsFree) {
  const WorldState s = line_state();
  const World& w = s.world();
  for (const TaskSpec& t : {TaskSpec({}, "none"), TaskSpec({pred(w, PredicateName::In, "cup1", "table")}, "done")}) {
    const Plan plan = task_plan(s, t);
    EXPECT_TRUE(plan.actions.empty());
    EXPECT_EQ(plan.total_cost, Cost::zero());
    EXPECT_EQ(plan.terminal, s);
  }
}

TEST(Planner, ReplayReachesTerminalAndSumsCost) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto inst = make_tiny(seed);
    for (const auto& e : inst.dist.entries) {
      const Plan plan = task_plan(inst.state, e.task);
      EXPECT_EQ(replay(inst.state, plan.actions), plan.terminal);
      EXPECT_EQ(sum_costs(plan.actions), plan.total_cost);
      EXPECT_TRUE(satisfies(plan.terminal, e.task));
    }
  }
}

TEST(Planner, MatchesUniformCostSearch) {
  for (std::uint64_t seed = 100; seed < 115; ++seed) {
    const auto inst = make_tiny(seed);
    for (const auto& e : inst.dist.entries)
      EXPECT_EQ(task_plan(inst.state, e.task).total_cost, ucs_cost(inst.state, e.task)) << "seed " << seed;
  }
}

TEST(Planner, HeuristicIsAdmissibleOnReachableStates) {
  for (std::uint64_t seed = 200; seed < 206; ++seed) {
    const auto inst = make_tiny(seed);
    const StateSpace sp = enumerate_states(inst.state);
    for (const auto& e : inst.dist.entries) {
      const GoalHeuristic h(inst.state.world(), e.task);
      const auto to_go = cost_to_go(sp, e.task);
      for (std::size_t i = 0; i < sp.states.size(); ++i) {
        if (to_go[i].is_infinite()) continue;
        EXPECT_LE(h(sp.states[i]), to_go[i]);
      }
    }
  }
}

TEST(Planner, UnsolvableGoals) {
  const WorldState s = line_state();
  const World& w = s.world();
  const TaskSpec conflict({pred(w, PredicateName::In, "cup1", "sink"), pred(w, PredicateName::In, "cup1", "table")},
                          "two places");
  try {
    task_plan(s, conflict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unsolvable);
  }
  const TaskSpec dirty({pred(w, PredicateName::Dirty, "cup1")}, "dirty");
  EXPECT_THROW(task_plan(s, dirty), Error);
}

TEST(Planner, BudgetValidationAndExhaustion) {
  SearchBudget zero{0, std::chrono::milliseconds(100)};
  EXPECT_THROW(zero.validate(), Error);
  const WorldState s = line_state();
  const World& w = s.world();
  const TaskSpec task({pred(w, PredicateName::FilledWith, "cup1", "coffee"), pred(w, PredicateName::In, "cup1", "sink"),
                       pred(w, PredicateName::In, "bowl1", "water-dispenser")},
                      "long");
  try {
    const Plan p = task_plan(s, task, SearchBudget{3, std::chrono::milliseconds(1000)});
    EXPECT_FALSE(p.optimal);
    EXPECT_TRUE(satisfies(p.terminal, task));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BudgetExhausted);
  }
}

TEST(Planner, DeterministicTieBreaking) {
  const auto inst = make_tiny(31);
  for (const auto& e : inst.dist.entries) {
    const Plan a = task_plan(inst.state, e.task), b = task_plan(inst.state, e.task);
    EXPECT_EQ(a.actions, b.actions);
    EXPECT_EQ(a.expansions, b.expansions);
  }
}

TEST(Planner, FillRequiresCleanCup) {
  WorldState s(line_world(), {0, 0}, {{kTable, 1, -1}, {kTable, 0, -1}, {kTable, 0, -1}});
  const World& w = s.world();
  const Plan plan = task_plan(s, TaskSpec({pred(w, PredicateName::FilledWith, "cup1", "water")}, "water"));
  bool washed = false;
  for (const auto& a : plan.actions) washed = washed || a.name == ActionName::Wash;
  EXPECT_TRUE(washed);
  EXPECT_EQ(plan.total_cost, ucs_cost(s, TaskSpec({pred(w, PredicateName::FilledWith, "cup1", "water")}, "water")));
}
