#include "antplan/preparation.hpp"

#include <cmath>

#include "antplan/error.hpp"
#include "antplan/rng.hpp"

namespace antplan {

void AnnealSchedule::validate() const {
  if (iterations < 1) throw Error(ErrorKind::InvalidArgument, "iterations must be at least 1");
  if (t0 && !(*t0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "t0 must be positive");
  if (!(decay > 0.0 && decay < 1.0)) throw Error(ErrorKind::InvalidArgument, "decay must lie in (0, 1)");
}

bool reachable_configuration(const WorldState& s0, const WorldState& s) {
  const World& w = s0.world();
  for (std::size_t i = 0; i < s.objects().size(); ++i) {
    const int o = static_cast<int>(i);
    const ObjectState& a = s0.object(o);
    const ObjectState& b = s.object(o);
    if (b.dirty && (!a.dirty || b.liquid != a.liquid)) return false;
    if (b.dirty || (b.dirty == a.dirty && b.liquid == a.liquid)) continue;
    // Clean with new contents: wash first unless already clean and empty.
    if ((a.dirty || a.liquid >= 0) && (!w.washable(o) || w.sinks().empty())) return false;
    if (b.liquid >= 0) {
      const bool source = (b.liquid == w.water_slot() && !w.water_sources().empty()) ||
                          (b.liquid == w.coffee_slot() && !w.coffee_sources().empty());
      if (!source) return false;
    }
  }
  return true;
}

WorldState prepare(const WorldState& s0, const CostEstimator& estimator, const AnnealSchedule& schedule) {
  schedule.validate();
  Rng rng(schedule.seed);
  WorldState current = s0;
  double current_value = estimator.estimate(s0);
  WorldState best = s0;
  double best_value = current_value;
  double t = schedule.t0 ? *schedule.t0 : 0.1 * current_value;
  if (!(t > 0.0)) t = 1e-9;

  for (int it = 0; it < schedule.iterations; ++it, t *= schedule.decay) {
    const auto changes = atomic_changes(current);
    if (changes.empty()) break;
    const WorldState proposal = apply_change(current, changes[rng.index(changes.size())]);
    const double u = rng.uniform();
    if (!reachable_configuration(s0, proposal)) continue;
    double value = 0.0;
    try {
      value = estimator.estimate(proposal);
    } catch (const UnsolvableTask&) {
      continue;
    }
    const double delta = value - current_value;
    if (delta < 0.0 || u < std::exp(-delta / t)) {
      current = proposal;
      current_value = value;
      if (value < best_value) {
        best = proposal;
        best_value = value;
      }
    }
  }
  return best;
}

WorldState prepare(const WorldState& s0, const CostEstimator& estimator, const AnnealSchedule& schedule,
                   int chains) {
  if (chains < 1) throw Error(ErrorKind::InvalidArgument, "chains must be at least 1");
  if (chains == 1) return prepare(s0, estimator, schedule);
  std::optional<WorldState> best;
  double best_value = 0.0;
  for (int c = 0; c < chains; ++c) {
    AnnealSchedule s = schedule;
    s.seed = Rng::mix(schedule.seed, static_cast<std::uint64_t>(c));
    WorldState result = prepare(s0, estimator, s);
    const double value = estimator.estimate(result);
    if (!best || value < best_value) {
      best = std::move(result);
      best_value = value;
    }
  }
  return *best;
}

TaskSpec difference_task(const WorldState& s0, const WorldState& target) {
  const World& w = s0.world();
  std::vector<Predicate> goal, placement;
  bool changed = false;
  for (std::size_t i = 0; i < target.objects().size(); ++i) {
    const int o = static_cast<int>(i);
    const ObjectState& a = s0.object(o);
    const ObjectState& b = target.object(o);
    const EntityId id = w.objects()[o];
    if (a.location != b.location) changed = true;
    if (b.location == kHeld) placement.push_back(Predicate::make(PredicateName::Holding, w.robot(), id));
    else placement.push_back(Predicate::make(PredicateName::In, id, w.containers()[b.location]));
    if (a.dirty != b.dirty)
      goal.push_back(Predicate::make(b.dirty ? PredicateName::Dirty : PredicateName::Clean, id));
    if (w.fillable(o) && (a.liquid != b.liquid || a.dirty != b.dirty)) {
      goal.push_back(b.liquid >= 0 ? Predicate::make(PredicateName::FilledWith, id, w.liquids()[b.liquid])
                                   : Predicate::make(PredicateName::Empty, id));
    }
  }
  // clear() relocates bystanders, so any change pins every placement.
  if (changed || !goal.empty()) goal.insert(goal.end(), placement.begin(), placement.end());
  return TaskSpec(std::move(goal), "preparation");
}

Cost preparation_cost(const WorldState& s0, const WorldState& target, const SearchBudget& budget) {
  const TaskSpec task = difference_task(s0, target);
  try {
    return task_plan(s0, task, budget).total_cost;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExhausted) throw;
  }
  // One object at a time.
  const World& w = s0.world();
  std::vector<std::vector<Predicate>> per_object(w.objects().size());
  for (const Predicate& p : task.goal) {
    const EntityId id = p.name == PredicateName::Holding ? p.args[1] : p.args[0];
    per_object[w.object_slot(id)].push_back(p);
  }
  // Objects already in place come first, the held object last.
  std::vector<int> order;
  const int n = static_cast<int>(per_object.size());
  auto in_place = [&](int o) { return s0.object(o) == target.object(o); };
  for (int o = 0; o < n; ++o)
    if (!per_object[o].empty() && in_place(o)) order.push_back(o);
  for (int o = 0; o < n; ++o)
    if (!per_object[o].empty() && !in_place(o) && target.object(o).location != kHeld) order.push_back(o);
  for (int o = 0; o < n; ++o)
    if (!per_object[o].empty() && !in_place(o) && target.object(o).location == kHeld) order.push_back(o);

  // Goals already reached stay in the goal so that clear() cannot undo them.
  WorldState state = s0;
  Cost total = Cost::zero();
  std::vector<Predicate> reached;
  for (int o : order) {
    reached.insert(reached.end(), per_object[o].begin(), per_object[o].end());
    const Plan plan = task_plan(state, TaskSpec(reached, "preparation"), budget);
    total += plan.total_cost;
    state = plan.terminal;
  }
  if (!satisfies(state, task))
    throw Error(ErrorKind::BudgetExhausted, "preparation plan not found within the search budget");
  return total;
}

}  // namespace antplan
