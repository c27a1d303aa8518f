#pragma once

#include <cstdint>
#include <optional>

#include "antplan/anticipation.hpp"

namespace antplan {

struct AnnealSchedule {
  int iterations = 2000;
  /// Initial temperature; unset means 10% of the estimate at the start state.
  std::optional<double> t0;
  double decay = 0.999;
  std::uint64_t seed = 0;

  /// iterations ≥ 1, t0 > 0 when set, 0 < decay < 1; throws invalid-argument.
  void validate() const;
};

/// True when every object configuration of `s` can be produced from `s0`:
/// no clean object turns dirty, dirty objects keep their contents, and every
/// new liquid has a source.
bool reachable_configuration(const WorldState& s0, const WorldState& s);

/// Simulated annealing over single atomic changes. Proposals are accepted
/// when they lower the estimate, or with probability exp(−Δ/T); T decays
/// geometrically. Proposals outside reachable_configuration() and those
/// leaving a future task unsolvable are skipped.
/// Returns the best state seen, so the estimate never exceeds the one at s0.
WorldState prepare(const WorldState& s0, const CostEstimator& estimator, const AnnealSchedule& schedule);

/// Best of `chains` independent runs seeded from `schedule.seed`.
WorldState prepare(const WorldState& s0, const CostEstimator& estimator, const AnnealSchedule& schedule,
                   int chains);

/// Goal that pins the flags of every object of `target` whose state differs
/// from `s0`, plus every object's placement. Empty when the states agree.
TaskSpec difference_task(const WorldState& s0, const WorldState& target);

/// Cost of the optimal plan realizing difference_task(s0, target). When that
/// search exhausts the budget, the objects are solved one at a time instead
/// and the (upper-bound) cost of the concatenated plan is returned.
/// Throws unsolvable, or budget-exhausted when even the fallback fails.
Cost preparation_cost(const WorldState& s0, const WorldState& target, const SearchBudget& budget = {});

}  // namespace antplan
