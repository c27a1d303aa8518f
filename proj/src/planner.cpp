#include "antplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "antplan/error.hpp"

namespace antplan {

void SearchBudget::validate() const {
  if (max_expansions == 0) throw Error(ErrorKind::InvalidArgument, "max-expansions must be positive");
  if (max_time.count() <= 0) throw Error(ErrorKind::InvalidArgument, "max-time must be positive");
}

Cost sum_costs(const std::vector<GroundedAction>& actions) {
  Cost total = Cost::zero();
  for (const GroundedAction& a : actions) total += a.cost;
  return total;
}

WorldState replay(const WorldState& state, const std::vector<GroundedAction>& actions) {
  WorldState s = state;
  for (const GroundedAction& a : actions) s = apply(s, a);
  return s;
}

// ---------------------------------------------------------------------------
// Heuristic

GoalHeuristic::GoalHeuristic(const World& world, const TaskSpec& task) : world_(&world) {
  const int n_objects = static_cast<int>(world.objects().size());
  std::vector<int> goal_index(n_objects, -1);
  is_goal_object_.assign(n_objects, 0);
  auto goal_for = [&](int o) -> ObjectGoal& {
    if (goal_index[o] < 0) {
      goal_index[o] = static_cast<int>(objects_.size());
      objects_.push_back({});
      objects_.back().object = o;
      is_goal_object_[o] = 1;
    }
    return objects_[goal_index[o]];
  };
  int held_goals = 0;
  for (const Predicate& p : task.goal) {
    const EntityId a = p.args[0];
    const EntityId b = p.args[1];
    switch (p.name) {
      case PredicateName::In:
      case PredicateName::ServedAt: {
        const int o = world.object_slot(a);
        const int c = world.container_slot(b);
        if (o < 0 || c < 0) { impossible_ = true; break; }
        if (p.name == PredicateName::ServedAt && !world.container(c).has(Attribute::IsSurface)) {
          impossible_ = true;
          break;
        }
        ObjectGoal& g = goal_for(o);
        if ((g.in >= 0 && g.in != c) || g.held) impossible_ = true;
        g.in = c;
        break;
      }
      case PredicateName::Holding: {
        const int o = world.object_slot(b);
        if (a != world.robot() || o < 0) { impossible_ = true; break; }
        ObjectGoal& g = goal_for(o);
        if (g.in >= 0) impossible_ = true;
        if (!g.held) ++held_goals;
        g.held = true;
        break;
      }
      case PredicateName::HandEmpty:
        if (a != world.robot()) impossible_ = true;
        hand_empty_ = true;
        break;
      case PredicateName::At: {
        const int c = world.container_slot(b);
        if (a != world.robot() || c < 0 || (at_container_ >= 0 && at_container_ != c)) {
          impossible_ = true;
          break;
        }
        at_container_ = c;
        break;
      }
      case PredicateName::Clean:
      case PredicateName::Dirty: {
        const int o = world.object_slot(a);
        if (o < 0 || !world.washable(o)) { impossible_ = true; break; }
        ObjectGoal& g = goal_for(o);
        (p.name == PredicateName::Clean ? g.clean : g.dirty) = true;
        if (g.clean && g.dirty) impossible_ = true;
        break;
      }
      case PredicateName::FilledWith: {
        const int o = world.object_slot(a);
        const int l = world.liquid_slot(b);
        if (o < 0 || l < 0 || !world.fillable(o)) { impossible_ = true; break; }
        ObjectGoal& g = goal_for(o);
        if ((g.liquid >= 0 && g.liquid != l) || g.empty) impossible_ = true;
        g.liquid = l;
        break;
      }
      case PredicateName::Empty: {
        if (const int c = world.container_slot(a); c >= 0) {
          empty_containers_.push_back(c);
          break;
        }
        const int o = world.object_slot(a);
        if (o < 0 || !world.fillable(o)) { impossible_ = true; break; }
        ObjectGoal& g = goal_for(o);
        if (g.liquid >= 0) impossible_ = true;
        g.empty = true;
        break;
      }
    }
  }
  if (held_goals > 1 || (held_goals > 0 && hand_empty_)) impossible_ = true;
  std::sort(empty_containers_.begin(), empty_containers_.end());
  empty_containers_.erase(std::unique(empty_containers_.begin(), empty_containers_.end()),
                          empty_containers_.end());
  for (const ObjectGoal& g : objects_)
    if (g.in >= 0 && std::binary_search(empty_containers_.begin(), empty_containers_.end(), g.in))
      impossible_ = true;
}

namespace {

// A standing cell: a container cell (slot >= 0) or the robot's current cell.
struct Position {
  Cell cell;
  int slot;
  double cost;
};

double position_distance(const World& w, const Position& from, const Position& to) {
  if (to.slot >= 0) return w.distance(to.slot, from.cell);
  // A cell without a container can only be occupied at the start.
  return from.slot >= 0 ? kUnreachable : 0.0;
}

// Standing cells from which any container in `targets` can be manipulated.
std::vector<Position> positions_for(const World& w, const std::vector<int>& targets, Cell robot) {
  std::vector<Position> out;
  bool robot_added = false;
  for (int t : targets) {
    for (int q : w.reach_positions(t)) {
      const bool dup = std::any_of(out.begin(), out.end(), [q](const Position& p) { return p.slot == q; });
      if (!dup) out.push_back({w.container_cell(q), q, kUnreachable});
    }
    if (!robot_added && w.within_reach(robot, t) && w.container_at(robot) < 0) {
      out.push_back({robot, -1, kUnreachable});
      robot_added = true;
    }
  }
  return out;
}

// Shortest route from the robot through one position of each layer, in order.
double chain_bound(const World& w, Cell robot, const std::vector<std::vector<int>>& layers) {
  std::vector<Position> current{{robot, w.container_at(robot), 0.0}};
  for (const auto& layer : layers) {
    std::vector<Position> next = positions_for(w, layer, robot);
    for (Position& q : next) {
      for (const Position& p : current) {
        if (p.cost == kUnreachable) continue;
        q.cost = std::min(q.cost, p.cost + position_distance(w, p, q));
      }
    }
    current = std::move(next);
  }
  double best = kUnreachable;
  for (const Position& p : current) best = std::min(best, p.cost);
  return best;
}

}  // namespace

Cost GoalHeuristic::operator()(const WorldState& state) const {
  if (impossible_) return Cost::infinite();
  const World& w = *world_;
  const ActionCosts& costs = w.costs();
  const Cell robot = state.robot_cell();
  const int held = state.held_slot();
  const int disposal = w.disposal_slot();

  Cost manip = Cost::zero();
  double motion = 0.0;
  bool pick_needed = false;
  const int n_containers = static_cast<int>(w.containers().size());
  std::vector<int> clear_group(n_containers, 0);
  std::vector<std::vector<int>> layers;
  std::vector<int> all_containers(n_containers);
  std::iota(all_containers.begin(), all_containers.end(), 0);

  for (const ObjectGoal& g : objects_) {
    const ObjectState& s = state.object(g.object);
    const bool dirty = s.dirty != 0;
    if (g.dirty && !dirty) return Cost::infinite();
    const bool need_wash = (g.clean && dirty) ||
                           (g.liquid >= 0 && s.liquid != g.liquid && (dirty || s.liquid >= 0)) ||
                           (g.empty && s.liquid >= 0);
    if (g.dirty && need_wash) return Cost::infinite();
    const bool need_fill = g.liquid >= 0 && (need_wash || s.liquid != g.liquid);
    const bool is_held = s.location == kHeld;
    const bool handling = need_wash || need_fill;

    bool need_place = false;
    if (g.in >= 0) {
      need_place = handling || s.location != g.in;
    } else if (!g.held) {
      need_place = hand_empty_ && (handling || is_held);
    }
    const bool need_pick = !is_held && (handling || need_place || g.held);

    if (g.in >= 0 && g.in == disposal && !handling && !is_held && s.location != disposal) {
      // clear(location) or pick + place; costed per container below.
      ++clear_group[s.location];
      continue;
    }

    const std::vector<int>* stations = nullptr;
    if (need_fill) {
      if (g.liquid == w.water_slot()) stations = &w.water_sources();
      else if (g.liquid == w.coffee_slot()) stations = &w.coffee_sources();
      if (!stations || stations->empty()) return Cost::infinite();
    }
    if (need_wash && w.sinks().empty()) return Cost::infinite();

    if (need_pick) manip += costs.pick;
    if (need_wash) manip += costs.wash;
    if (need_fill) manip += g.liquid == w.water_slot() ? costs.fill : costs.make_coffee;
    if (need_place) manip += costs.place;
    pick_needed = pick_needed || need_pick;

    layers.clear();
    if (need_pick) layers.push_back({s.location});
    if (need_wash) layers.push_back(w.sinks());
    if (need_fill) layers.push_back(*stations);
    if (need_place && g.in >= 0) {
      // Anything placed elsewhere can still reach the disposal container by clear().
      if (g.in == disposal) layers.push_back(all_containers);
      else layers.push_back({g.in});
    }
    if (!layers.empty()) motion = std::max(motion, chain_bound(w, robot, layers));
  }

  for (int c : empty_containers_) {
    for (int o = 0; o < static_cast<int>(state.objects().size()); ++o)
      if (!is_goal_object_[o] && state.object(o).location == c) ++clear_group[c];
  }
  for (int c = 0; c < n_containers; ++c) {
    if (clear_group[c] == 0) continue;
    // Without hand-empty the last object may stay in the hand.
    Cost one_by_one = (costs.pick + costs.place) * clear_group[c];
    if (!hand_empty_) one_by_one = one_by_one - costs.place;
    manip += (c != disposal && disposal >= 0) ? std::min(costs.clear, one_by_one) : one_by_one;
    motion = std::max(motion, chain_bound(w, robot, {{c}}));
  }

  if (held >= 0 && !is_goal_object_[held] && (pick_needed || hand_empty_)) manip += costs.place;
  if (at_container_ >= 0) motion = std::max(motion, w.distance(at_container_, robot));

  if (motion == kUnreachable) return Cost::infinite();
  // Each move is rounded to three decimals; keep a per-move margin below the true distance.
  const auto motion_milli = static_cast<std::int64_t>(std::floor(motion * 1000.0)) - 2;
  return manip + Cost::from_milli(std::max<std::int64_t>(0, motion_milli));
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct Node {
  WorldState state;
  Cost g;
  Cost h;
  int parent;
  GroundedAction action;
  int depth;
  bool closed;
};

struct OpenEntry {
  std::int64_t f;
  std::int64_t h;
  int depth;
  std::uint64_t seq;
  std::int64_t g;
  int node;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    if (a.depth != b.depth) return a.depth > b.depth;
    return a.seq > b.seq;
  }
};

Plan extract(const std::deque<Node>& nodes, int goal, std::size_t expansions, bool optimal) {
  std::vector<GroundedAction> actions;
  for (int n = goal; nodes[n].parent >= 0; n = nodes[n].parent) actions.push_back(nodes[n].action);
  std::reverse(actions.begin(), actions.end());
  return Plan{std::move(actions), nodes[goal].g, nodes[goal].state, expansions, optimal};
}


// Objects the goal can depend on: those it names and those inside containers
// that must end up empty (or, under a capacity limit, any named container).
// Manipulating any other object never shortens a plan.
std::vector<char> relevant_objects(const WorldState& state, const TaskSpec& task) {
  const World& w = state.world();
  const int n = static_cast<int>(w.objects().size());
  std::vector<char> relevant(n, 0);
  std::vector<char> named_container(w.containers().size(), 0);
  for (const Predicate& p : task.goal)
    for (int i = 0; i < arity(p.name); ++i) {
      if (const int o = w.object_slot(p.args[i]); o >= 0) relevant[o] = 1;
      const int c = w.container_slot(p.args[i]);
      if (c >= 0 && (p.name == PredicateName::Empty || w.capacity_limit())) named_container[c] = 1;
    }
  for (int o = 0; o < n; ++o) {
    const auto loc = state.object(o).location;
    if (loc != kHeld && named_container[loc]) relevant[o] = 1;
  }
  return relevant;
}

Plan search(const WorldState& state, const TaskSpec& task, const SearchBudget& budget, const GoalHeuristic& heuristic,
            Cost h0, const std::vector<char>* relevant) {
  const World& world = state.world();
  auto pruned = [&](const GroundedAction& a) {
    if (!relevant) return false;
    switch (a.name) {
      case ActionName::Pick:
      case ActionName::Wash:
      case ActionName::Fill:
      case ActionName::MakeCoffee:
        return !(*relevant)[world.object_slot(a.args[0])];
      default:
        return false;
    }
  };

  std::deque<Node> nodes;
  std::unordered_map<WorldState, int, WorldStateHash> index;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  std::uint64_t seq = 0;

  nodes.push_back({state, Cost::zero(), h0, -1, {}, 0, false});
  index.emplace(state, 0);
  open.push({h0.milli(), h0.milli(), 0, seq++, 0, 0});

  int incumbent = -1;
  std::size_t expansions = 0;
  const auto start_time = std::chrono::steady_clock::now();

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    Node& node = nodes[top.node];
    if (node.closed || node.g.milli() != top.g) continue;
    if (satisfies(node.state, task)) return extract(nodes, top.node, expansions, true);
    node.closed = true;

    if (expansions >= budget.max_expansions ||
        ((expansions & 255) == 0 && std::chrono::steady_clock::now() - start_time > budget.max_time)) {
      if (incumbent >= 0) return extract(nodes, incumbent, expansions, false);
      throw Error(ErrorKind::BudgetExhausted, "no plan for '" + task.label + "' within " +
                                                  std::to_string(expansions) + " expansions");
    }
    ++expansions;

    const int parent = top.node;
    const Cost parent_g = node.g;
    const int depth = node.depth + 1;
    for_each_successor(nodes[parent].state, [&](const GroundedAction& action, WorldState&& next) {
      if (pruned(action)) return;
      const Cost g = parent_g + action.cost;
      auto it = index.find(next);
      int id;
      if (it != index.end()) {
        id = it->second;
        if (g >= nodes[id].g) return;
        nodes[id].g = g;
        nodes[id].parent = parent;
        nodes[id].action = action;
        nodes[id].depth = depth;
        nodes[id].closed = false;
      } else {
        const Cost h = heuristic(next);
        if (h.is_infinite()) return;
        id = static_cast<int>(nodes.size());
        index.emplace(next, id);
        nodes.push_back({std::move(next), g, h, parent, action, depth, false});
      }
      const Node& n = nodes[id];
      if (incumbent < 0 || g < nodes[incumbent].g) {
        if (satisfies(n.state, task)) incumbent = id;
      }
      open.push({(g + n.h).milli(), n.h.milli(), depth, seq++, g.milli(), id});
    });
  }
  throw Error(ErrorKind::Unsolvable, "search space exhausted for '" + task.label + "'");
}

}  // namespace

Plan task_plan(const WorldState& state, const TaskSpec& task, const SearchBudget& budget) {
  budget.validate();
  if (satisfies(state, task)) return Plan{{}, Cost::zero(), state, 0, true};

  const GoalHeuristic heuristic(state.world(), task);
  const Cost h0 = heuristic(state);
  if (h0.is_infinite()) throw Error(ErrorKind::Unsolvable, "goal of '" + task.label + "' is unreachable");

  const auto relevant = relevant_objects(state, task);
  if (!state.world().capacity_limit()) return search(state, task, budget, heuristic, h0, &relevant);
  try {
    return search(state, task, budget, heuristic, h0, &relevant);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Unsolvable) throw;
  }
  return search(state, task, budget, heuristic, h0, nullptr);
}

}  // namespace antplan
