#pragma once

#include <chrono>
#include <cstddef>
#include <vector>

#include "antplan/world.hpp"

namespace antplan {

struct SearchBudget {
  std::size_t max_expansions = 200000;
  std::chrono::milliseconds max_time{10000};

  /// Both limits positive; throws invalid-argument.
  void validate() const;
};

struct Plan {
  std::vector<GroundedAction> actions;
  Cost total_cost;
  WorldState terminal;
  std::size_t expansions = 0;
  /// False when the search budget ran out and the best incumbent was returned.
  bool optimal = true;
};

/// Admissible estimate of the remaining plan cost to a goal.
///
/// Each goal object contributes the manipulation actions it still needs
/// (pick, wash, fill or make-coffee, place) and a motion bound: the shortest
/// route visiting, in order, a standing cell within reach of its current
/// container, of a sink, of a liquid source and of its destination. The
/// estimate is the sum of manipulation floors plus the largest motion bound.
/// Objects that only have to end up in the disposal container may be moved by
/// one shared clear action, so they are costed per container.
class GoalHeuristic {
 public:
  GoalHeuristic(const World& world, const TaskSpec& task);

  /// Cost::infinite() when the goal is provably unreachable from `state`.
  Cost operator()(const WorldState& state) const;

 private:
  struct ObjectGoal {
    int object = -1;
    int in = -1;  ///< destination container slot
    int liquid = -1;
    bool clean = false;
    bool dirty = false;
    bool empty = false;
    bool held = false;
  };
  const World* world_;
  std::vector<ObjectGoal> objects_;
  std::vector<int> empty_containers_;
  std::vector<char> is_goal_object_;
  int at_container_ = -1;
  bool hand_empty_ = false;
  bool impossible_ = false;
};

/// Best-first search (A*) from `state` to any state satisfying `task`.
/// Returns a minimum-cost plan when the budget is not exhausted. Throws
/// unsolvable when the reachable space holds no goal state, and
/// budget-exhausted when the budget runs out without any incumbent.
Plan task_plan(const WorldState& state, const TaskSpec& task, const SearchBudget& budget = {});

/// Terminal state of a plan.
inline const WorldState& tail(const Plan& plan) { return plan.terminal; }

/// Folds apply() over `actions`; throws inapplicable-action.
WorldState replay(const WorldState& state, const std::vector<GroundedAction>& actions);

Cost sum_costs(const std::vector<GroundedAction>& actions);

}  // namespace antplan
