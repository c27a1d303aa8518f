#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "antplan/cost.hpp"
#include "antplan/grid.hpp"

namespace antplan {

enum class EntityKind : std::uint8_t { Robot, Room, Container, Object };
inline constexpr int kNumKinds = 4;

enum class Attribute : std::uint8_t {
  IsDirty,
  IsEmpty,
  IsLiquid,
  IsFillable,
  IsWashable,
  IsSurface,
  IsWaterSource,
  IsCoffeeSource,
  IsSink,
};
inline constexpr int kNumAttributes = 9;
using AttributeSet = std::bitset<kNumAttributes>;

const char* to_string(EntityKind kind);
const char* to_string(Attribute attribute);
std::optional<EntityKind> parse_kind(std::string_view text);
std::optional<Attribute> parse_attribute(std::string_view text);

/// Index of an entity in its World.
struct EntityId {
  std::int32_t value = -1;
  constexpr bool valid() const { return value >= 0; }
  friend constexpr auto operator<=>(EntityId, EntityId) = default;
};

struct Entity {
  std::string id;    ///< unique handle, e.g. "cup1"
  std::string name;  ///< category label from the profile vocabulary, e.g. "cup"
  EntityKind kind = EntityKind::Object;
  std::optional<Cell> cell;  ///< robot, rooms and containers only
  AttributeSet attributes;   ///< static flags; isDirty/isEmpty are derived from facts
  EntityId room;             ///< containers: enclosing room

  bool has(Attribute a) const { return attributes.test(static_cast<std::size_t>(a)); }
};

enum class PredicateName : std::uint8_t {
  At,
  In,
  Holding,
  HandEmpty,
  Dirty,
  Clean,
  FilledWith,
  Empty,
  ServedAt,
};

int arity(PredicateName name);
const char* to_string(PredicateName name);
std::optional<PredicateName> parse_predicate_name(std::string_view text);

struct Predicate {
  PredicateName name = PredicateName::HandEmpty;
  std::array<EntityId, 2> args{};

  static Predicate make(PredicateName name, EntityId a, EntityId b = {}) { return {name, {a, b}}; }
  friend constexpr auto operator<=>(const Predicate&, const Predicate&) = default;
};

/// Sorted, duplicate-free predicate collection.
class FactSet {
 public:
  FactSet() = default;
  explicit FactSet(std::vector<Predicate> facts);

  void insert(const Predicate& p);
  bool contains(const Predicate& p) const;
  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }
  auto begin() const { return facts_.begin(); }
  auto end() const { return facts_.end(); }
  const std::vector<Predicate>& items() const { return facts_; }
  friend bool operator==(const FactSet&, const FactSet&) = default;

 private:
  std::vector<Predicate> facts_;
};

/// Alphabetical, which is also the tie-breaking order of the planner.
enum class ActionName : std::uint8_t { Clear, Fill, MakeCoffee, Move, Pick, Place, Wash };

const char* to_string(ActionName name);

/// move(c) | pick(o, c) | place(o, c) | clear(c) | fill(o, src) | make-coffee(o, src) | wash(o, sink)
struct GroundedAction {
  ActionName name = ActionName::Move;
  std::array<EntityId, 2> args{};
  Cost cost;

  friend bool operator==(const GroundedAction&, const GroundedAction&) = default;
};

struct ActionCosts {
  Cost pick = Cost::from_milli(2000);
  Cost place = Cost::from_milli(2000);
  Cost wash = Cost::from_milli(5000);
  Cost fill = Cost::from_milli(3000);
  Cost make_coffee = Cost::from_milli(5000);
  Cost clear = Cost::from_milli(3000);
};

enum class Profile : std::uint8_t { Home, Restaurant };
const char* to_string(Profile profile);
std::optional<Profile> parse_profile(std::string_view text);

inline constexpr int kHomeCapacity = 7;

/// Static part of an environment: grid, entities and domain constants.
/// Immutable once constructed; shared by every WorldState over it.
class World {
 public:
  /// Validates entity invariants; throws invalid-world.
  World(OccupancyGrid grid, std::vector<Entity> entities, Profile profile,
        std::optional<int> capacity_limit = std::nullopt, ActionCosts costs = {},
        EntityId disposal = {});

  const OccupancyGrid& grid() const { return *grid_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const Entity& entity(EntityId id) const { return entities_[id.value]; }
  bool contains(EntityId id) const {
    return id.value >= 0 && id.value < static_cast<int>(entities_.size());
  }
  std::optional<EntityId> find(std::string_view id) const;
  /// Throws unknown-entity.
  EntityId require(std::string_view id) const;

  Profile profile() const { return profile_; }
  std::optional<int> capacity_limit() const { return capacity_; }
  const ActionCosts& costs() const { return costs_; }

  EntityId robot() const { return robot_; }
  const std::vector<EntityId>& rooms() const { return rooms_; }
  /// Containers, movable objects and liquids in entity order; positions are "slots".
  const std::vector<EntityId>& containers() const { return containers_; }
  const std::vector<EntityId>& objects() const { return objects_; }
  const std::vector<EntityId>& liquids() const { return liquids_; }

  int container_slot(EntityId id) const { return slot_of(id, 0); }
  int object_slot(EntityId id) const { return slot_of(id, 1); }
  int liquid_slot(EntityId id) const { return slot_of(id, 2); }

  Cell container_cell(int slot) const { return *entities_[containers_[slot].value].cell; }
  const Entity& container(int slot) const { return entities_[containers_[slot].value]; }
  const Entity& object(int slot) const { return entities_[objects_[slot].value]; }

  bool fillable(int object_slot) const { return object(object_slot).has(Attribute::IsFillable); }
  bool washable(int object_slot) const { return object(object_slot).has(Attribute::IsWashable); }

  int disposal_slot() const { return disposal_slot_; }
  int water_slot() const { return water_slot_; }
  int coffee_slot() const { return coffee_slot_; }
  const std::vector<int>& sinks() const { return sinks_; }
  const std::vector<int>& water_sources() const { return water_sources_; }
  const std::vector<int>& coffee_sources() const { return coffee_sources_; }

  /// Grid distance between a container's cell and any cell.
  double distance(int container_slot, Cell cell) const { return fields_[container_slot]->at(cell); }
  /// Move cost to a container cell, rounded to three decimals.
  Cost move_cost(Cell from, int container_slot) const {
    return Cost::from_units(distance(container_slot, from));
  }
  /// Manipulation reach: Chebyshev distance at most one.
  bool within_reach(Cell robot, int container_slot) const {
    return chebyshev(robot, container_cell(container_slot)) <= 1;
  }
  /// Container slots whose cell lies within reach of this container.
  const std::vector<int>& reach_positions(int container_slot) const {
    return reach_positions_[container_slot];
  }
  /// Container slot whose cell equals `cell`, or -1.
  int container_at(Cell cell) const;
  /// Room of the container at or nearest to `cell`.
  EntityId room_of_cell(Cell cell) const;

 private:
  int slot_of(EntityId id, int table) const;

  std::shared_ptr<const OccupancyGrid> grid_;
  std::vector<Entity> entities_;
  Profile profile_;
  std::optional<int> capacity_;
  ActionCosts costs_;
  EntityId robot_;
  std::vector<EntityId> rooms_, containers_, objects_, liquids_;
  std::vector<std::array<int, 3>> slots_;
  int disposal_slot_ = -1;
  int water_slot_ = -1;
  int coffee_slot_ = -1;
  std::vector<int> sinks_, water_sources_, coffee_sources_;
  std::vector<std::shared_ptr<const DistanceField>> fields_;
  std::vector<std::vector<int>> reach_positions_;
};

inline constexpr std::uint8_t kHeld = 0xFF;

/// Per-object dynamic state.
struct ObjectState {
  std::uint8_t location = 0;  ///< container slot, or kHeld
  std::uint8_t dirty = 0;
  std::int8_t liquid = -1;  ///< liquid slot, -1 when empty

  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

/// Complete snapshot: the shared World plus robot cell and object states.
/// The predicate view is available through `facts()` and `holds()`.
class WorldState {
 public:
  /// Validates all state invariants; throws invalid-world.
  WorldState(std::shared_ptr<const World> world, Cell robot, std::vector<ObjectState> objects);

  /// Builds a state from an explicit fact set. Derived facts (at, hand-empty,
  /// empty containers, served-at) are optional but must be consistent.
  static WorldState from_facts(std::shared_ptr<const World> world, Cell robot, const FactSet& facts);

  const World& world() const { return *world_; }
  const std::shared_ptr<const World>& world_ptr() const { return world_; }
  Cell robot_cell() const { return robot_; }
  const std::vector<ObjectState>& objects() const { return objects_; }
  const ObjectState& object(int slot) const { return objects_[slot]; }
  int held_slot() const;
  int count_in(int container_slot) const;

  FactSet facts() const;
  bool holds(const Predicate& p) const;

  /// Throws invalid-world on any invariant violation.
  void validate() const;

  std::size_t hash() const;
  friend bool operator==(const WorldState& a, const WorldState& b) {
    return a.world_ == b.world_ && a.robot_ == b.robot_ && a.objects_ == b.objects_;
  }

  // Raw edits. Callers are responsible for keeping invariants (see validate()).
  void set_robot_cell(Cell c) { robot_ = c; }
  ObjectState& mutable_object(int slot) { return objects_[slot]; }

 private:
  WorldState() = default;
  std::shared_ptr<const World> world_;
  Cell robot_;
  std::vector<ObjectState> objects_;
};

struct WorldStateHash {
  std::size_t operator()(const WorldState& s) const { return s.hash(); }
};

/// A goal conjunction. An empty goal is satisfied everywhere.
struct TaskSpec {
  std::vector<Predicate> goal;  ///< sorted, unique
  std::string label;

  TaskSpec() = default;
  TaskSpec(std::vector<Predicate> goal_predicates, std::string task_label);
  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Every grounded action whose preconditions hold, in canonical order
/// (action name, then arguments).
std::vector<GroundedAction> applicable_actions(const WorldState& state);

bool is_applicable(const WorldState& state, const GroundedAction& action);

/// Throws inapplicable-action.
WorldState apply(const WorldState& state, const GroundedAction& action);

/// True iff every goal predicate holds. Throws unknown-entity for ids outside the world.
bool satisfies(const WorldState& state, const TaskSpec& task);

/// One atomic edit of the object configuration.
struct AtomicChange {
  enum class Kind : std::uint8_t { Relocate, ToggleDirty, SetLiquid };
  Kind kind;
  int object;  ///< object slot
  int value;   ///< container slot for Relocate, liquid slot (or -1) for SetLiquid
};

/// All legal atomic changes, in canonical order.
std::vector<AtomicChange> atomic_changes(const WorldState& state);
WorldState apply_change(const WorldState& state, const AtomicChange& change);

/// Uniform draw over atomic_changes(). Throws no-legal-perturbation.
WorldState perturb(const WorldState& state, std::uint64_t seed);

std::string describe(const World& world, const Predicate& p);
std::string describe(const World& world, const GroundedAction& a);

/// Applies `fn(action, successor)` for each applicable action in canonical order.
template <typename Fn>
void for_each_successor(const WorldState& state, Fn&& fn);

}  // namespace antplan

#include "antplan/detail/successors.hpp"
