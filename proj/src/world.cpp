#include "antplan/world.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "antplan/error.hpp"
#include "antplan/rng.hpp"

namespace antplan {

namespace {

constexpr std::array<const char*, kNumKinds> kKindNames = {"robot", "room", "container", "object"};
constexpr std::array<const char*, kNumAttributes> kAttributeNames = {
    "isDirty",    "isEmpty",   "isLiquid",       "isFillable",     "isWashable",
    "isSurface",  "isWaterSource", "isCoffeeSource", "isSink"};
constexpr std::array<const char*, 9> kPredicateNames = {
    "at", "in", "holding", "hand-empty", "dirty", "clean", "filled-with", "empty", "served-at"};
constexpr std::array<int, 9> kArity = {2, 2, 2, 1, 1, 1, 2, 1, 2};
constexpr std::array<const char*, 7> kActionNames = {"clear", "fill",  "make-coffee", "move",
                                                     "pick",  "place", "wash"};

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidWorld, what); }

}  // namespace

const char* to_string(EntityKind kind) { return kKindNames[static_cast<int>(kind)]; }
const char* to_string(Attribute a) { return kAttributeNames[static_cast<int>(a)]; }
const char* to_string(PredicateName name) { return kPredicateNames[static_cast<int>(name)]; }
const char* to_string(ActionName name) { return kActionNames[static_cast<int>(name)]; }
int arity(PredicateName name) { return kArity[static_cast<int>(name)]; }

const char* to_string(Profile profile) {
  return profile == Profile::Home ? "home" : "restaurant";
}

std::optional<Profile> parse_profile(std::string_view text) {
  if (text == "home") return Profile::Home;
  if (text == "restaurant") return Profile::Restaurant;
  return std::nullopt;
}

std::optional<EntityKind> parse_kind(std::string_view text) {
  for (int i = 0; i < kNumKinds; ++i)
    if (text == kKindNames[i]) return static_cast<EntityKind>(i);
  return std::nullopt;
}

std::optional<Attribute> parse_attribute(std::string_view text) {
  for (int i = 0; i < kNumAttributes; ++i)
    if (text == kAttributeNames[i]) return static_cast<Attribute>(i);
  return std::nullopt;
}

std::optional<PredicateName> parse_predicate_name(std::string_view text) {
  for (std::size_t i = 0; i < kPredicateNames.size(); ++i)
    if (text == kPredicateNames[i]) return static_cast<PredicateName>(i);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// FactSet

FactSet::FactSet(std::vector<Predicate> facts) : facts_(std::move(facts)) {
  std::sort(facts_.begin(), facts_.end());
  facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());
}

void FactSet::insert(const Predicate& p) {
  auto it = std::lower_bound(facts_.begin(), facts_.end(), p);
  if (it == facts_.end() || *it != p) facts_.insert(it, p);
}

bool FactSet::contains(const Predicate& p) const {
  return std::binary_search(facts_.begin(), facts_.end(), p);
}

// ---------------------------------------------------------------------------
// World

World::World(OccupancyGrid grid, std::vector<Entity> entities, Profile profile,
             std::optional<int> capacity_limit, ActionCosts costs, EntityId disposal)
    : grid_(std::make_shared<const OccupancyGrid>(std::move(grid))),
      entities_(std::move(entities)),
      profile_(profile),
      capacity_(capacity_limit),
      costs_(costs) {
  if (capacity_ && *capacity_ < 1) invalid("capacity limit must be positive");
  if (entities_.size() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    invalid("too many entities");

  slots_.assign(entities_.size(), {-1, -1, -1});
  std::vector<Cell> occupied;
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    const Entity& e = entities_[i];
    const EntityId id{static_cast<std::int32_t>(i)};
    if (e.id.empty()) invalid("entity " + std::to_string(i) + " has an empty id");
    for (std::size_t j = 0; j < i; ++j)
      if (entities_[j].id == e.id) invalid("duplicate entity id '" + e.id + "'");
    const bool needs_cell = e.kind != EntityKind::Object;
    if (needs_cell && !e.cell) invalid("entity '" + e.id + "' (" + to_string(e.kind) + ") needs a cell");
    if (e.cell) {
      if (!grid_->in_bounds(*e.cell)) invalid("entity '" + e.id + "' cell is out of bounds");
      if (grid_->blocked(*e.cell)) invalid("entity '" + e.id + "' cell is blocked");
    }
    if (e.has(Attribute::IsDirty) || e.has(Attribute::IsEmpty))
      invalid("entity '" + e.id + "': isDirty/isEmpty are derived from facts, not static flags");
    switch (e.kind) {
      case EntityKind::Robot:
        if (robot_.valid()) invalid("more than one robot");
        robot_ = id;
        break;
      case EntityKind::Room:
        rooms_.push_back(id);
        break;
      case EntityKind::Container:
        for (Cell c : occupied)
          if (c == *e.cell) invalid("container '" + e.id + "' shares its cell with another container");
        occupied.push_back(*e.cell);
        slots_[i][0] = static_cast<int>(containers_.size());
        containers_.push_back(id);
        break;
      case EntityKind::Object:
        if (e.has(Attribute::IsLiquid)) {
          slots_[i][2] = static_cast<int>(liquids_.size());
          liquids_.push_back(id);
        } else {
          if (e.has(Attribute::IsFillable) && !e.has(Attribute::IsWashable))
            invalid("object '" + e.id + "' is fillable but not washable");
          slots_[i][1] = static_cast<int>(objects_.size());
          objects_.push_back(id);
        }
        break;
    }
  }
  if (!robot_.valid()) invalid("world has no robot");
  if (containers_.size() >= kHeld) invalid("too many containers");
  if (liquids_.size() > 100) invalid("too many liquids");
  for (EntityId c : containers_) {
    const Entity& e = entity(c);
    if (!rooms_.empty()) {
      if (!contains(e.room) || entity(e.room).kind != EntityKind::Room)
        invalid("container '" + e.id + "' has no valid room");
    }
  }
  for (EntityId l : liquids_) {
    const std::string& name = entity(l).name;
    if (name == "water") water_slot_ = liquid_slot(l);
    if (name == "coffee") coffee_slot_ = liquid_slot(l);
  }
  for (int s = 0; s < static_cast<int>(containers_.size()); ++s) {
    const Entity& e = container(s);
    if (e.has(Attribute::IsSink)) sinks_.push_back(s);
    if (e.has(Attribute::IsWaterSource)) water_sources_.push_back(s);
    if (e.has(Attribute::IsCoffeeSource)) coffee_sources_.push_back(s);
  }
  if (disposal.valid()) {
    if (!contains(disposal) || entity(disposal).kind != EntityKind::Container)
      invalid("disposal must be a container");
    disposal_slot_ = container_slot(disposal);
  } else if (!sinks_.empty()) {
    disposal_slot_ = sinks_.front();
  }

  fields_.reserve(containers_.size());
  for (std::size_t s = 0; s < containers_.size(); ++s)
    fields_.push_back(std::make_shared<const DistanceField>(
        distance_field(*grid_, container_cell(static_cast<int>(s)))));
  reach_positions_.resize(containers_.size());
  for (std::size_t a = 0; a < containers_.size(); ++a)
    for (std::size_t b = 0; b < containers_.size(); ++b)
      if (chebyshev(container_cell(static_cast<int>(a)), container_cell(static_cast<int>(b))) <= 1)
        reach_positions_[a].push_back(static_cast<int>(b));
}

int World::slot_of(EntityId id, int table) const {
  if (!contains(id)) return -1;
  return slots_[id.value][table];
}

std::optional<EntityId> World::find(std::string_view id) const {
  for (std::size_t i = 0; i < entities_.size(); ++i)
    if (entities_[i].id == id) return EntityId{static_cast<std::int32_t>(i)};
  return std::nullopt;
}

EntityId World::require(std::string_view id) const {
  if (auto found = find(id)) return *found;
  throw Error(ErrorKind::UnknownEntity, "'" + std::string(id) + "'");
}

int World::container_at(Cell cell) const {
  for (std::size_t s = 0; s < containers_.size(); ++s)
    if (container_cell(static_cast<int>(s)) == cell) return static_cast<int>(s);
  return -1;
}

EntityId World::room_of_cell(Cell cell) const {
  if (containers_.empty()) return rooms_.empty() ? EntityId{} : rooms_.front();
  int best = 0;
  long best_d = std::numeric_limits<long>::max();
  for (std::size_t s = 0; s < containers_.size(); ++s) {
    const Cell c = container_cell(static_cast<int>(s));
    const long d = static_cast<long>(c.x - cell.x) * (c.x - cell.x) +
                   static_cast<long>(c.y - cell.y) * (c.y - cell.y);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(s);
    }
  }
  return container(best).room;
}

// ---------------------------------------------------------------------------
// WorldState

WorldState::WorldState(std::shared_ptr<const World> world, Cell robot, std::vector<ObjectState> objects)
    : world_(std::move(world)), robot_(robot), objects_(std::move(objects)) {
  validate();
}

int WorldState::held_slot() const {
  for (std::size_t o = 0; o < objects_.size(); ++o)
    if (objects_[o].location == kHeld) return static_cast<int>(o);
  return -1;
}

int WorldState::count_in(int container_slot) const {
  int n = 0;
  for (const ObjectState& o : objects_) n += o.location == container_slot;
  return n;
}

void WorldState::validate() const {
  const World& w = *world_;
  if (!w.grid().free(robot_)) invalid("robot cell is blocked or out of bounds");
  if (objects_.size() != w.objects().size()) invalid("object state count does not match world");
  const int n_containers = static_cast<int>(w.containers().size());
  int held = 0;
  std::vector<int> counts(n_containers, 0);
  for (std::size_t o = 0; o < objects_.size(); ++o) {
    const ObjectState& s = objects_[o];
    const std::string& id = w.object(static_cast<int>(o)).id;
    if (s.location == kHeld) {
      ++held;
    } else if (s.location >= n_containers) {
      invalid("object '" + id + "' has an invalid location");
    } else {
      ++counts[s.location];
    }
    if (s.dirty > 1) invalid("object '" + id + "' has an invalid dirty flag");
    if (s.dirty && !w.washable(static_cast<int>(o))) invalid("object '" + id + "' is dirty but not washable");
    if (s.liquid >= 0 && !w.fillable(static_cast<int>(o)))
      invalid("object '" + id + "' holds a liquid but is not fillable");
    if (s.liquid >= static_cast<int>(w.liquids().size()) || s.liquid < -1)
      invalid("object '" + id + "' holds an unknown liquid");
  }
  if (held > 1) invalid("robot holds more than one object");
  if (auto cap = w.capacity_limit()) {
    for (int c = 0; c < n_containers; ++c)
      if (counts[c] > *cap)
        invalid("container '" + w.container(c).id + "' exceeds capacity " + std::to_string(*cap));
  }
}

FactSet WorldState::facts() const {
  const World& w = *world_;
  std::vector<Predicate> out;
  const EntityId robot = w.robot();
  const int container_here = w.container_at(robot_);
  if (container_here >= 0)
    out.push_back(Predicate::make(PredicateName::At, robot, w.containers()[container_here]));
  bool holding = false;
  std::vector<int> counts(w.containers().size(), 0);
  for (std::size_t o = 0; o < objects_.size(); ++o) {
    const ObjectState& s = objects_[o];
    const int slot = static_cast<int>(o);
    const EntityId id = w.objects()[o];
    if (s.location == kHeld) {
      holding = true;
      out.push_back(Predicate::make(PredicateName::Holding, robot, id));
    } else {
      ++counts[s.location];
      const EntityId c = w.containers()[s.location];
      out.push_back(Predicate::make(PredicateName::In, id, c));
      if (w.container(s.location).has(Attribute::IsSurface))
        out.push_back(Predicate::make(PredicateName::ServedAt, id, c));
    }
    if (w.washable(slot))
      out.push_back(Predicate::make(s.dirty ? PredicateName::Dirty : PredicateName::Clean, id));
    if (w.fillable(slot)) {
      if (s.liquid >= 0)
        out.push_back(Predicate::make(PredicateName::FilledWith, id, w.liquids()[s.liquid]));
      else
        out.push_back(Predicate::make(PredicateName::Empty, id));
    }
  }
  if (!holding) out.push_back(Predicate::make(PredicateName::HandEmpty, robot));
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] == 0) out.push_back(Predicate::make(PredicateName::Empty, w.containers()[c]));
  return FactSet(std::move(out));
}

bool WorldState::holds(const Predicate& p) const {
  const World& w = *world_;
  const EntityId a = p.args[0];
  const EntityId b = p.args[1];
  switch (p.name) {
    case PredicateName::At: {
      const int c = w.container_slot(b);
      return a == w.robot() && c >= 0 && w.container_cell(c) == robot_;
    }
    case PredicateName::In: {
      const int o = w.object_slot(a);
      const int c = w.container_slot(b);
      return o >= 0 && c >= 0 && objects_[o].location == c;
    }
    case PredicateName::ServedAt: {
      const int o = w.object_slot(a);
      const int c = w.container_slot(b);
      return o >= 0 && c >= 0 && objects_[o].location == c &&
             w.container(c).has(Attribute::IsSurface);
    }
    case PredicateName::Holding: {
      const int o = w.object_slot(b);
      return a == w.robot() && o >= 0 && objects_[o].location == kHeld;
    }
    case PredicateName::HandEmpty:
      return a == w.robot() && held_slot() < 0;
    case PredicateName::Dirty: {
      const int o = w.object_slot(a);
      return o >= 0 && w.washable(o) && objects_[o].dirty;
    }
    case PredicateName::Clean: {
      const int o = w.object_slot(a);
      return o >= 0 && w.washable(o) && !objects_[o].dirty;
    }
    case PredicateName::FilledWith: {
      const int o = w.object_slot(a);
      const int l = w.liquid_slot(b);
      return o >= 0 && l >= 0 && w.fillable(o) && objects_[o].liquid == l;
    }
    case PredicateName::Empty: {
      if (const int c = w.container_slot(a); c >= 0) return count_in(c) == 0;
      const int o = w.object_slot(a);
      return o >= 0 && w.fillable(o) && objects_[o].liquid < 0;
    }
  }
  return false;
}

std::size_t WorldState::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint32_t>(robot_.x));
  mix(static_cast<std::uint32_t>(robot_.y));
  for (const ObjectState& o : objects_)
    mix(static_cast<std::uint64_t>(o.location) | (static_cast<std::uint64_t>(o.dirty) << 8) |
        (static_cast<std::uint64_t>(static_cast<std::uint8_t>(o.liquid)) << 16));
  return static_cast<std::size_t>(h);
}

WorldState WorldState::from_facts(std::shared_ptr<const World> world, Cell robot, const FactSet& facts) {
  const World& w = *world;
  const std::size_t n = w.objects().size();
  std::vector<ObjectState> objects(n);
  std::vector<bool> placed(n, false);
  std::vector<bool> saw_dirty(n, false), saw_clean(n, false), saw_filled(n, false),
      saw_empty(n, false);

  auto name_of = [&w](EntityId id) {
    return w.contains(id) ? w.entity(id).id : std::string("#") + std::to_string(id.value);
  };
  auto object_of = [&](EntityId id, const Predicate& p) {
    const int o = w.object_slot(id);
    if (o < 0) invalid(describe(w, p) + ": '" + name_of(id) + "' is not a movable object");
    return o;
  };
  std::vector<const Predicate*> derived;
  for (const Predicate& p : facts) {
    for (int i = 0; i < arity(p.name); ++i)
      if (!w.contains(p.args[i]))
        throw Error(ErrorKind::UnknownEntity, "fact references entity #" + std::to_string(p.args[i].value));
    switch (p.name) {
      case PredicateName::In: {
        const int o = object_of(p.args[0], p);
        const int c = w.container_slot(p.args[1]);
        if (c < 0) invalid(describe(w, p) + ": second argument is not a container");
        if (placed[o]) invalid("object '" + name_of(p.args[0]) + "' has more than one location");
        placed[o] = true;
        objects[o].location = static_cast<std::uint8_t>(c);
        break;
      }
      case PredicateName::Holding: {
        if (p.args[0] != w.robot()) invalid(describe(w, p) + ": first argument is not the robot");
        const int o = object_of(p.args[1], p);
        if (placed[o]) invalid("object '" + name_of(p.args[1]) + "' has more than one location");
        placed[o] = true;
        objects[o].location = kHeld;
        break;
      }
      case PredicateName::Dirty: {
        const int o = object_of(p.args[0], p);
        if (!w.washable(o)) invalid(describe(w, p) + ": object is not washable");
        saw_dirty[o] = true;
        objects[o].dirty = 1;
        break;
      }
      case PredicateName::Clean: {
        const int o = object_of(p.args[0], p);
        if (!w.washable(o)) invalid(describe(w, p) + ": object is not washable");
        saw_clean[o] = true;
        break;
      }
      case PredicateName::FilledWith: {
        const int o = object_of(p.args[0], p);
        const int l = w.liquid_slot(p.args[1]);
        if (l < 0) invalid(describe(w, p) + ": second argument is not a liquid");
        if (!w.fillable(o)) invalid(describe(w, p) + ": object is not fillable");
        if (saw_filled[o]) invalid("object '" + name_of(p.args[0]) + "' filled with two liquids");
        saw_filled[o] = true;
        objects[o].liquid = static_cast<std::int8_t>(l);
        break;
      }
      case PredicateName::Empty:
        if (w.container_slot(p.args[0]) >= 0) {
          derived.push_back(&p);
        } else {
          const int o = object_of(p.args[0], p);
          if (!w.fillable(o)) invalid(describe(w, p) + ": object is not fillable");
          saw_empty[o] = true;
        }
        break;
      case PredicateName::At:
      case PredicateName::HandEmpty:
      case PredicateName::ServedAt:
        derived.push_back(&p);
        break;
    }
  }
  for (std::size_t o = 0; o < n; ++o) {
    const std::string& id = w.object(static_cast<int>(o)).id;
    if (!placed[o]) invalid("object '" + id + "' is in no container and not held");
    if (saw_dirty[o] && saw_clean[o]) invalid("object '" + id + "' is both dirty and clean");
    if (saw_filled[o] && saw_empty[o]) invalid("object '" + id + "' is both filled and empty");
  }
  WorldState state;
  state.world_ = std::move(world);
  state.robot_ = robot;
  state.objects_ = std::move(objects);
  state.validate();
  for (const Predicate* p : derived)
    if (!state.holds(*p)) invalid("fact " + describe(state.world(), *p) + " contradicts the state");
  return state;
}

// ---------------------------------------------------------------------------
// TaskSpec

TaskSpec::TaskSpec(std::vector<Predicate> goal_predicates, std::string task_label)
    : goal(std::move(goal_predicates)), label(std::move(task_label)) {
  std::sort(goal.begin(), goal.end());
  goal.erase(std::unique(goal.begin(), goal.end()), goal.end());
}

// ---------------------------------------------------------------------------
// Transitions

std::vector<GroundedAction> applicable_actions(const WorldState& state) {
  std::vector<GroundedAction> out;
  for_each_successor(state, [&out](const GroundedAction& a, WorldState&&) { out.push_back(a); });
  return out;
}

bool is_applicable(const WorldState& state, const GroundedAction& action) {
  bool found = false;
  for_each_successor(state, [&](const GroundedAction& a, WorldState&&) {
    found = found || (a.name == action.name && a.args == action.args);
  });
  return found;
}

WorldState apply(const WorldState& state, const GroundedAction& action) {
  std::optional<WorldState> result;
  for_each_successor(state, [&](const GroundedAction& a, WorldState&& next) {
    if (!result && a.name == action.name && a.args == action.args) result.emplace(std::move(next));
  });
  if (!result) throw Error(ErrorKind::InapplicableAction, describe(state.world(), action));
  return std::move(*result);
}

bool satisfies(const WorldState& state, const TaskSpec& task) {
  const World& w = state.world();
  for (const Predicate& p : task.goal)
    for (int i = 0; i < arity(p.name); ++i)
      if (!w.contains(p.args[i]))
        throw Error(ErrorKind::UnknownEntity,
                    "task '" + task.label + "' references entity #" + std::to_string(p.args[i].value));
  return std::all_of(task.goal.begin(), task.goal.end(),
                     [&state](const Predicate& p) { return state.holds(p); });
}

std::vector<AtomicChange> atomic_changes(const WorldState& state) {
  const World& w = state.world();
  const int n_containers = static_cast<int>(w.containers().size());
  const auto cap = w.capacity_limit();
  std::vector<int> counts(n_containers, 0);
  for (const ObjectState& o : state.objects())
    if (o.location != kHeld) ++counts[o.location];

  std::vector<AtomicChange> out;
  const int n = static_cast<int>(state.objects().size());
  for (int o = 0; o < n; ++o) {
    for (int c = 0; c < n_containers; ++c) {
      if (state.object(o).location == c) continue;
      if (cap && counts[c] >= *cap) continue;
      out.push_back({AtomicChange::Kind::Relocate, o, c});
    }
  }
  for (int o = 0; o < n; ++o)
    if (w.washable(o)) out.push_back({AtomicChange::Kind::ToggleDirty, o, 0});
  for (int o = 0; o < n; ++o) {
    if (!w.fillable(o)) continue;
    if (state.object(o).liquid >= 0) {
      out.push_back({AtomicChange::Kind::SetLiquid, o, -1});
    } else {
      for (int l = 0; l < static_cast<int>(w.liquids().size()); ++l)
        out.push_back({AtomicChange::Kind::SetLiquid, o, l});
    }
  }
  return out;
}

WorldState apply_change(const WorldState& state, const AtomicChange& change) {
  WorldState next = state;
  ObjectState& o = next.mutable_object(change.object);
  switch (change.kind) {
    case AtomicChange::Kind::Relocate:
      o.location = static_cast<std::uint8_t>(change.value);
      break;
    case AtomicChange::Kind::ToggleDirty:
      o.dirty = o.dirty ? 0 : 1;
      break;
    case AtomicChange::Kind::SetLiquid:
      o.liquid = static_cast<std::int8_t>(change.value);
      break;
  }
  return next;
}

WorldState perturb(const WorldState& state, std::uint64_t seed) {
  const auto changes = atomic_changes(state);
  if (changes.empty()) throw Error(ErrorKind::NoLegalPerturbation, "state admits no atomic change");
  Rng rng(seed);
  return apply_change(state, changes[rng.index(changes.size())]);
}

std::string describe(const World& w, const Predicate& p) {
  std::string out = to_string(p.name);
  out += '(';
  for (int i = 0; i < arity(p.name); ++i) {
    if (i) out += ", ";
    out += w.contains(p.args[i]) ? w.entity(p.args[i]).id : "#" + std::to_string(p.args[i].value);
  }
  return out + ')';
}

std::string describe(const World& w, const GroundedAction& a) {
  std::string out = to_string(a.name);
  out += '(';
  const int n = (a.name == ActionName::Move || a.name == ActionName::Clear) ? 1 : 2;
  for (int i = 0; i < n; ++i) {
    if (i) out += ", ";
    out += w.contains(a.args[i]) ? w.entity(a.args[i]).id : "#" + std::to_string(a.args[i].value);
  }
  return out + ')';
}

}  // namespace antplan
