#include "antplan/anticipation.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "antplan/error.hpp"
#include "antplan/rng.hpp"

namespace antplan {

double anticipatory_cost_exact(const WorldState& state, const TaskDistribution& dist,
                               const SearchBudget& budget) {
  double total = 0.0;
  for (std::size_t i = 0; i < dist.entries.size(); ++i) {
    const auto& entry = dist.entries[i];
    try {
      total += entry.weight * task_plan(state, entry.task, budget).total_cost.units();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unsolvable && e.kind() != ErrorKind::BudgetExhausted) throw;
      throw UnsolvableTask(i, entry.task.label, e.what());
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Oracle

OracleEstimator::OracleEstimator(TaskDistribution dist, SearchBudget budget, bool cache)
    : dist_(std::move(dist)), budget_(budget), use_cache_(cache) {
  budget_.validate();
}

std::size_t OracleEstimator::cache_size() const {
  std::lock_guard lock(mutex_);
  return memo_.size();
}

void OracleEstimator::prepare(const World& world) const {
  if (prepared_for_ == &world) return;
  prepared_for_ = &world;
  memo_.clear();
  info_.clear();
  for (const auto& entry : dist_.entries) {
    TaskInfo info;
    for (const Predicate& p : entry.task.goal) {
      for (int i = 0; i < arity(p.name); ++i) {
        const EntityId id = p.args[i];
        if (!world.contains(id)) continue;
        if (world.object_slot(id) >= 0) info.goal_objects.push_back(id);
        if (p.name == PredicateName::Empty && world.container_slot(id) >= 0)
          info.empty_containers.push_back(id);
      }
    }
    for (auto* v : {&info.goal_objects, &info.empty_containers}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    info_.push_back(std::move(info));
  }
}

std::string OracleEstimator::key(const WorldState& state, std::size_t i) const {
  const World& w = state.world();
  const TaskInfo& info = info_[i];
  std::string k;
  auto put = [&k](std::int32_t v) { k.append(reinterpret_cast<const char*>(&v), sizeof v); };
  put(static_cast<std::int32_t>(i));
  put(state.robot_cell().x);
  put(state.robot_cell().y);
  std::vector<char> goal_object(state.objects().size(), 0);
  for (EntityId id : info.goal_objects) {
    const int o = w.object_slot(id);
    goal_object[o] = 1;
    const ObjectState& s = state.object(o);
    put(s.location | (s.dirty << 8) | ((s.liquid + 1) << 16));
  }
  const int held = state.held_slot();
  put(held >= 0 && !goal_object[held]);
  auto count_other = [&](int c) {
    int n = 0;
    for (std::size_t o = 0; o < state.objects().size(); ++o)
      n += !goal_object[o] && state.object(static_cast<int>(o)).location == c;
    return n;
  };
  for (EntityId id : info.empty_containers) put(count_other(w.container_slot(id)));
  if (w.capacity_limit()) {
    for (std::size_t c = 0; c < w.containers().size(); ++c) put(count_other(static_cast<int>(c)));
  }
  return k;
}

Cost OracleEstimator::task_cost(const WorldState& state, std::size_t i) const {
  const auto& entry = dist_.entries.at(i);
  auto solve = [&] {
    try {
      return task_plan(state, entry.task, budget_).total_cost;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unsolvable && e.kind() != ErrorKind::BudgetExhausted) throw;
      throw UnsolvableTask(i, entry.task.label, e.what());
    }
  };
  if (!use_cache_) return solve();
  std::string k;
  {
    std::lock_guard lock(mutex_);
    prepare(state.world());
    k = key(state, i);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
  }
  const Cost cost = solve();
  std::lock_guard lock(mutex_);
  memo_.emplace(std::move(k), cost);
  return cost;
}

double OracleEstimator::estimate(const WorldState& state) const {
  double total = 0.0;
  for (std::size_t i = 0; i < dist_.entries.size(); ++i)
    total += dist_.entries[i].weight * task_cost(state, i).units();
  return total;
}

// ---------------------------------------------------------------------------
// Augmentation

TaskSpec AugmentedTask::combined() const {
  std::vector<Predicate> goal = base.goal;
  goal.insert(goal.end(), added.begin(), added.end());
  return TaskSpec(std::move(goal), base.label);
}

namespace {

[[noreturn]] void unimposable(const World& w, const Predicate& p, const std::string& why) {
  throw Error(ErrorKind::UnimposablePredicate, describe(w, p) + ": " + why);
}

void impose_one(WorldState& s, const Predicate& p) {
  const World& w = s.world();
  const EntityId a = p.args[0];
  const EntityId b = p.args[1];
  switch (p.name) {
    case PredicateName::At: {
      const int c = w.container_slot(b);
      if (a != w.robot() || c < 0) unimposable(w, p, "not a robot and container");
      s.set_robot_cell(w.container_cell(c));
      return;
    }
    case PredicateName::In:
    case PredicateName::ServedAt: {
      const int o = w.object_slot(a);
      const int c = w.container_slot(b);
      if (o < 0 || c < 0) unimposable(w, p, "not an object and container");
      if (p.name == PredicateName::ServedAt && !w.container(c).has(Attribute::IsSurface))
        unimposable(w, p, "not a surface");
      s.mutable_object(o).location = static_cast<std::uint8_t>(c);
      return;
    }
    case PredicateName::Holding: {
      const int o = w.object_slot(b);
      if (a != w.robot() || o < 0) unimposable(w, p, "not a robot and object");
      s.mutable_object(o).location = kHeld;
      return;
    }
    case PredicateName::HandEmpty:
      if (s.held_slot() >= 0) unimposable(w, p, "the held object has no destination");
      return;
    case PredicateName::Dirty: {
      const int o = w.object_slot(a);
      if (o < 0 || !w.washable(o)) unimposable(w, p, "not washable");
      s.mutable_object(o).dirty = 1;
      return;
    }
    case PredicateName::Clean: {
      const int o = w.object_slot(a);
      if (o < 0 || !w.washable(o)) unimposable(w, p, "not washable");
      if (!s.object(o).dirty) return;
      s.mutable_object(o).dirty = 0;
      s.mutable_object(o).liquid = -1;
      return;
    }
    case PredicateName::FilledWith: {
      const int o = w.object_slot(a);
      const int l = w.liquid_slot(b);
      if (o < 0 || l < 0 || !w.fillable(o)) unimposable(w, p, "not fillable");
      s.mutable_object(o).dirty = 0;
      s.mutable_object(o).liquid = static_cast<std::int8_t>(l);
      return;
    }
    case PredicateName::Empty: {
      if (const int o = w.object_slot(a); o >= 0) {
        if (!w.fillable(o)) unimposable(w, p, "not fillable");
        s.mutable_object(o).liquid = -1;
        return;
      }
      const int c = w.container_slot(a);
      const int disposal = w.disposal_slot();
      if (c < 0) unimposable(w, p, "not a container or fillable object");
      if (s.count_in(c) == 0) return;
      if (disposal < 0 || c == disposal) unimposable(w, p, "no disposal container to clear into");
      for (std::size_t o = 0; o < s.objects().size(); ++o)
        if (s.object(static_cast<int>(o)).location == c)
          s.mutable_object(static_cast<int>(o)).location = static_cast<std::uint8_t>(disposal);
      return;
    }
  }
}

}  // namespace

WorldState impose(const WorldState& state, const std::vector<Predicate>& added) {
  WorldState s = state;
  // Dirt goes last so that "dirty and filled" descriptions survive the clean-filling edit.
  for (const Predicate& p : added)
    if (p.name != PredicateName::Dirty) impose_one(s, p);
  for (const Predicate& p : added)
    if (p.name == PredicateName::Dirty) impose_one(s, p);
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::UnimposablePredicate, e.what());
  }
  for (const Predicate& p : added)
    if (!s.holds(p)) unimposable(s.world(), p, "conflicts with the other added predicates");
  return s;
}

std::vector<AugmentedTask> sample_augmented_tasks(const WorldState& s0, const TaskSpec& task,
                                                  const Plan& myopic, int k, std::uint64_t seed,
                                                  int radius, int max_added) {
  if (k < 0 || radius < 0 || max_added < 1 || max_added > 2)
    throw Error(ErrorKind::InvalidArgument, "k and radius must be nonnegative, max-added 1 or 2");
  const World& w = s0.world();
  const WorldState& terminal = myopic.terminal;

  std::vector<Cell> waypoints{s0.robot_cell()};
  for (const GroundedAction& a : myopic.actions)
    if (a.name == ActionName::Move) waypoints.push_back(w.container_cell(w.container_slot(a.args[0])));

  const int n_containers = static_cast<int>(w.containers().size());
  std::vector<char> near(n_containers, 0);
  for (int c = 0; c < n_containers; ++c)
    for (Cell p : waypoints)
      if (chebyshev(p, w.container_cell(c)) <= radius) near[c] = 1;

  std::vector<int> objects;
  for (int o = 0; o < static_cast<int>(s0.objects().size()); ++o) {
    const auto loc = s0.object(o).location;
    if (loc == kHeld || near[loc]) objects.push_back(o);
  }

  std::vector<Predicate> pool;
  auto consider = [&](const Predicate& p) {
    if (std::binary_search(task.goal.begin(), task.goal.end(), p)) return;
    if (terminal.holds(p)) return;
    try {
      if (!satisfies(impose(terminal, {p}), task)) return;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnimposablePredicate) throw;
      return;
    }
    pool.push_back(p);
  };
  for (int o : objects) {
    const EntityId oid = w.objects()[o];
    if (w.washable(o)) consider(Predicate::make(PredicateName::Clean, oid));
    for (int c = 0; c < n_containers; ++c)
      if (near[c]) consider(Predicate::make(PredicateName::In, oid, w.containers()[c]));
    if (w.fillable(o)) {
      if (w.water_slot() >= 0 && !w.water_sources().empty())
        consider(Predicate::make(PredicateName::FilledWith, oid, w.liquids()[w.water_slot()]));
      if (w.coffee_slot() >= 0 && !w.coffee_sources().empty())
        consider(Predicate::make(PredicateName::FilledWith, oid, w.liquids()[w.coffee_slot()]));
    }
  }
  for (int c = 0; c < n_containers; ++c)
    if (near[c]) consider(Predicate::make(PredicateName::Empty, w.containers()[c]));

  Rng rng(seed);
  std::vector<AugmentedTask> out;
  if (max_added == 1) {
    rng.shuffle(pool);
    for (std::size_t i = 0; i < pool.size() && static_cast<int>(out.size()) < k; ++i)
      out.push_back({task, {pool[i]}});
    return out;
  }
  std::set<std::vector<Predicate>> seen;
  const std::size_t attempts = static_cast<std::size_t>(k) * 8;
  for (std::size_t t = 0; t < attempts && static_cast<int>(out.size()) < k && !pool.empty(); ++t) {
    std::vector<Predicate> added{pool[rng.index(pool.size())]};
    if (pool.size() > 1 && rng.bernoulli(0.5)) {
      const Predicate second = pool[rng.index(pool.size())];
      if (second != added[0]) added.push_back(second);
    }
    std::sort(added.begin(), added.end());
    if (!seen.insert(added).second) continue;
    try {
      if (!satisfies(impose(terminal, added), task)) continue;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnimposablePredicate) throw;
      continue;
    }
    out.push_back({task, std::move(added)});
  }
  return out;
}

std::vector<AugmentedTask> exhaustive_augmentations(const WorldState& s0, const TaskSpec& task) {
  const World& w = s0.world();
  const int n_objects = static_cast<int>(s0.objects().size());
  const int n_containers = static_cast<int>(w.containers().size());

  // Per-object (dirty, liquid) configurations that some action sequence can produce:
  // the initial one, anything after a wash, and direct fills of a clean empty object.
  auto has_source = [&w](int l) {
    if (l == w.water_slot()) return !w.water_sources().empty();
    if (l == w.coffee_slot()) return !w.coffee_sources().empty();
    return false;
  };
  std::vector<std::vector<ObjectState>> options(n_objects);
  for (int o = 0; o < n_objects; ++o) {
    const ObjectState& init = s0.object(o);
    std::vector<std::pair<int, int>> flags{{init.dirty, init.liquid}};
    const bool can_wash = w.washable(o) && !w.sinks().empty();
    const bool clean_empty = !init.dirty && init.liquid < 0;
    if (can_wash || clean_empty) {
      flags.emplace_back(0, -1);
      if (w.fillable(o))
        for (int l = 0; l < static_cast<int>(w.liquids().size()); ++l)
          if (has_source(l)) flags.emplace_back(0, l);
    }
    std::sort(flags.begin(), flags.end());
    flags.erase(std::unique(flags.begin(), flags.end()), flags.end());
    for (int loc = 0; loc <= n_containers; ++loc) {
      const auto location = loc == n_containers ? kHeld : static_cast<std::uint8_t>(loc);
      for (auto [d, l] : flags)
        options[o].push_back({location, static_cast<std::uint8_t>(d), static_cast<std::int8_t>(l)});
    }
  }

  std::vector<Cell> robot_cells;
  for (int c = 0; c < n_containers; ++c) robot_cells.push_back(w.container_cell(c));
  if (w.container_at(s0.robot_cell()) < 0) robot_cells.insert(robot_cells.begin(), s0.robot_cell());

  std::vector<AugmentedTask> out;
  std::vector<ObjectState> current(n_objects);
  std::vector<std::size_t> pick(n_objects, 0);
  const auto cap = w.capacity_limit();
  auto emit = [&]() {
    int held = 0;
    std::vector<int> counts(n_containers, 0);
    for (const ObjectState& s : current) {
      if (s.location == kHeld) ++held;
      else ++counts[s.location];
    }
    if (held > 1) return;
    if (cap && std::any_of(counts.begin(), counts.end(), [&](int n) { return n > *cap; })) return;
    for (Cell r : robot_cells) {
      const WorldState state(s0.world_ptr(), r, current);
      if (!satisfies(state, task)) continue;
      std::vector<Predicate> desc;
      const int rc = w.container_at(r);
      if (rc >= 0) desc.push_back(Predicate::make(PredicateName::At, w.robot(), w.containers()[rc]));
      for (int o = 0; o < n_objects; ++o) {
        const EntityId id = w.objects()[o];
        const ObjectState& s = current[o];
        if (s.location == kHeld) desc.push_back(Predicate::make(PredicateName::Holding, w.robot(), id));
        else desc.push_back(Predicate::make(PredicateName::In, id, w.containers()[s.location]));
        if (w.washable(o))
          desc.push_back(Predicate::make(s.dirty ? PredicateName::Dirty : PredicateName::Clean, id));
        if (w.fillable(o))
          desc.push_back(s.liquid >= 0 ? Predicate::make(PredicateName::FilledWith, id, w.liquids()[s.liquid])
                                       : Predicate::make(PredicateName::Empty, id));
      }
      std::sort(desc.begin(), desc.end());
      std::vector<Predicate> added;
      std::set_difference(desc.begin(), desc.end(), task.goal.begin(), task.goal.end(),
                          std::back_inserter(added));
      out.push_back({task, std::move(added)});
    }
  };
  // Odometer over the per-object option lists.
  if (n_objects == 0) {
    emit();
    return out;
  }
  for (int o = 0; o < n_objects; ++o) {
    if (options[o].empty()) return out;
    current[o] = options[o][0];
  }
  while (true) {
    emit();
    int o = n_objects - 1;
    while (o >= 0 && ++pick[o] == options[o].size()) {
      pick[o] = 0;
      current[o] = options[o][0];
      --o;
    }
    if (o < 0) break;
    current[o] = options[o][pick[o]];
  }
  return out;
}

std::vector<AugmentedTask> filter_augmented_tasks(const std::vector<AugmentedTask>& candidates,
                                                  const WorldState& goal_state,
                                                  const CostEstimator& estimator, double baseline) {
  std::vector<AugmentedTask> kept;
  for (const AugmentedTask& cand : candidates) {
    try {
      const WorldState imposed = impose(goal_state, cand.added);
      if (imposed == goal_state) continue;
      if (estimator.estimate(imposed) < baseline) kept.push_back(cand);
    } catch (const UnsolvableTask&) {
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnimposablePredicate) throw;
    }
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Planning

Candidate myopic_candidate(const WorldState& s0, const TaskSpec& task, const CostEstimator& estimator,
                           const SearchBudget& budget) {
  Plan plan = task_plan(s0, task, budget);
  const double immediate = plan.total_cost.units();
  double future = std::numeric_limits<double>::infinity();
  try {
    future = estimator.estimate(plan.terminal);
  } catch (const UnsolvableTask&) {
  }
  return Candidate{std::move(plan), immediate, future, immediate + future, std::nullopt};
}

Candidate anticipatory_plan(const WorldState& s0, const TaskSpec& task, const CostEstimator& estimator,
                            const AnticipationOptions& options) {
  if (options.samples < 0) throw Error(ErrorKind::InvalidArgument, "samples must be nonnegative");
  Candidate best = myopic_candidate(s0, task, estimator, options.budget);
  if (options.samples == 0 && !options.exhaustive) return best;

  const std::vector<AugmentedTask> pool =
      options.exhaustive
          ? exhaustive_augmentations(s0, task)
          : sample_augmented_tasks(s0, task, best.plan, options.samples, options.seed, options.radius,
                                   options.max_added);
  const auto kept = filter_augmented_tasks(pool, best.plan.terminal, estimator, best.anticipatory);
  for (const AugmentedTask& aug : kept) {
    std::optional<Plan> plan;
    try {
      plan = task_plan(s0, aug.combined(), options.budget);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unsolvable && e.kind() != ErrorKind::BudgetExhausted) throw;
      continue;
    }
    const double immediate = plan->total_cost.units();
    if (immediate >= best.total) continue;
    double future = 0.0;
    try {
      future = estimator.estimate(plan->terminal);
    } catch (const UnsolvableTask&) {
      continue;
    }
    if (immediate + future < best.total) best = Candidate{std::move(*plan), immediate, future, immediate + future, aug};
  }
  return best;
}

}  // namespace antplan
