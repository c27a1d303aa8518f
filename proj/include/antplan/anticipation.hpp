#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "antplan/distribution.hpp"
#include "antplan/planner.hpp"

namespace antplan {

/// Estimate of the expected cost of one future task from a state.
class CostEstimator {
 public:
  virtual ~CostEstimator() = default;
  virtual double estimate(const WorldState& state) const = 0;
  virtual std::string name() const = 0;
};

/// Σ weight_i · optimal cost of task_i from `state`. Throws UnsolvableTask
/// naming the failing entry.
double anticipatory_cost_exact(const WorldState& state, const TaskDistribution& dist,
                               const SearchBudget& budget = {});

/// anticipatory_cost_exact with a memo keyed by the part of the state each
/// task's optimal cost depends on: robot cell, hand, the goal objects' states
/// and the contents counts the goal constrains.
class OracleEstimator final : public CostEstimator {
 public:
  OracleEstimator(TaskDistribution dist, SearchBudget budget = {}, bool cache = true);

  double estimate(const WorldState& state) const override;
  std::string name() const override { return "oracle"; }

  /// Optimal cost of entry `i` from `state`, through the memo.
  Cost task_cost(const WorldState& state, std::size_t i) const;

  const TaskDistribution& distribution() const { return dist_; }
  std::size_t cache_size() const;

 private:
  struct TaskInfo {
    std::vector<EntityId> goal_objects;
    std::vector<EntityId> empty_containers;
  };
  void prepare(const World& world) const;
  std::string key(const WorldState& state, std::size_t i) const;

  TaskDistribution dist_;
  SearchBudget budget_;
  bool use_cache_;
  mutable std::mutex mutex_;
  mutable const World* prepared_for_ = nullptr;
  mutable std::vector<TaskInfo> info_;
  mutable std::unordered_map<std::string, Cost> memo_;
};

/// Returns the same value for every state.
class ConstantEstimator final : public CostEstimator {
 public:
  explicit ConstantEstimator(double value = 0.0) : value_(value) {}
  double estimate(const WorldState&) const override { return value_; }
  std::string name() const override { return "constant"; }

 private:
  double value_;
};

struct AugmentedTask {
  TaskSpec base;
  std::vector<Predicate> added;  ///< sorted, disjoint from base.goal

  TaskSpec combined() const;
};

/// Focused sampling: at most `k` augmented tasks whose added predicates
/// (clean, in, filled-with, empty) only mention entities near the myopic
/// path. Containers count as near when their cell lies within Chebyshev
/// distance `radius` of a waypoint (start cell or move target); objects are
/// near when their container in `s0` is, or when held. Predicates already in
/// the goal, already true at the myopic terminal, or incompatible with the
/// goal are excluded.
std::vector<AugmentedTask> sample_augmented_tasks(const WorldState& s0, const TaskSpec& task,
                                                  const Plan& myopic, int k, std::uint64_t seed,
                                                  int radius = 3, int max_added = 1);

/// Every complete description (robot container, each object's location,
/// dirtiness and contents) consistent with `task`, minus the base goal,
/// restricted to configurations that no action sequence rules out from `s0`.
std::vector<AugmentedTask> exhaustive_augmentations(const WorldState& s0, const TaskSpec& task);

/// Makes `added` true by direct edits with action-effect semantics: clean
/// washes a dirty object (and leaves a clean one alone), filled-with leaves the
/// object clean with the given contents, empty(c) moves
/// the contents of c to the disposal container, in relocates. Throws
/// unimposable-predicate.
WorldState impose(const WorldState& state, const std::vector<Predicate>& added);

/// Keeps candidates whose imposed goal state scores strictly below `baseline`.
/// Unimposable candidates and those leaving a future task unsolvable are dropped.
std::vector<AugmentedTask> filter_augmented_tasks(const std::vector<AugmentedTask>& candidates,
                                                  const WorldState& goal_state,
                                                  const CostEstimator& estimator, double baseline);

struct Candidate {
  Plan plan;
  double immediate = 0.0;
  double anticipatory = 0.0;
  double total = 0.0;
  std::optional<AugmentedTask> augmentation;  ///< empty for the myopic candidate
};

struct AnticipationOptions {
  int samples = 20;
  int radius = 3;
  int max_added = 1;
  bool exhaustive = false;  ///< use exhaustive_augmentations instead of sampling
  SearchBudget budget;
  std::uint64_t seed = 0;
};

/// Myopic plan scored with the estimator at its terminal state. The future
/// cost is infinite when the terminal state leaves a future task unsolvable.
Candidate myopic_candidate(const WorldState& s0, const TaskSpec& task, const CostEstimator& estimator,
                           const SearchBudget& budget = {});

/// Minimum of immediate + estimated future cost over the myopic plan and the
/// plans of filtered augmented tasks. Never worse than the myopic candidate.
Candidate anticipatory_plan(const WorldState& s0, const TaskSpec& task, const CostEstimator& estimator,
                            const AnticipationOptions& options = {});

}  // namespace antplan
