#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "antplan/distribution.hpp"
#include "antplan/error.hpp"
#include "antplan/planner.hpp"
#include "antplan/rng.hpp"
#include "antplan/world.hpp"

namespace antplan::testkit {

inline AttributeSet attrs(std::initializer_list<Attribute> list) {
  AttributeSet s;
  for (Attribute a : list) s.set(static_cast<std::size_t>(a));
  return s;
}

inline Entity container_entity(const std::string& id, const std::string& name, Cell cell, EntityId room = {}) {
  Entity e{id, name, EntityKind::Container, cell, {}, room};
  if (name == "sink") e.attributes = attrs({Attribute::IsSink});
  if (name == "water-dispenser") e.attributes = attrs({Attribute::IsWaterSource});
  if (name == "coffee-machine") e.attributes = attrs({Attribute::IsCoffeeSource});
  if (name == "table" || name == "counter" || name == "shelf") e.attributes = attrs({Attribute::IsSurface});
  return e;
}

inline Entity object_entity(const std::string& id, const std::string& name) {
  Entity e{id, name, EntityKind::Object, std::nullopt, {}, {}};
  if (name == "cup" || name == "mug" || name == "glass" || name == "jar")
    e.attributes = attrs({Attribute::IsFillable, Attribute::IsWashable});
  if (name == "bowl" || name == "plate" || name == "fork" || name == "knife" || name == "spoon")
    e.attributes = attrs({Attribute::IsWashable});
  return e;
}

inline Entity liquid_entity(const std::string& name) {
  return Entity{name, name, EntityKind::Object, std::nullopt, attrs({Attribute::IsLiquid}), {}};
}

/// True when every free cell is 8-connected (no corner cutting) to the first one.
inline bool connected(const OccupancyGrid& g) {
  std::optional<Cell> first;
  for (std::size_t i = 0; i < g.size() && !first; ++i)
    if (!g.blocked(g.cell(i))) first = g.cell(i);
  if (!first) return false;
  const auto field = distance_field(g, *first);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.blocked(g.cell(i)) && !field.reachable(g.cell(i))) return false;
  return true;
}

/// Fixed 6x2 world: sink (0,0), table (2,0), water-dispenser (5,0),
/// coffee-machine (5,1); cup1, bowl1 and apple1; robot at the sink.
inline std::shared_ptr<const World> line_world() {
  const auto grid = OccupancyGrid::from_rows({"......", "......"});
  std::vector<Entity> e{
      Entity{"robot", "robot", EntityKind::Robot, Cell{0, 0}, {}, {}},
      container_entity("sink", "sink", {0, 0}),
      container_entity("table", "table", {2, 0}),
      container_entity("water-dispenser", "water-dispenser", {5, 0}),
      container_entity("coffee-machine", "coffee-machine", {5, 1}),
      object_entity("cup1", "cup"),
      object_entity("bowl1", "bowl"),
      object_entity("apple1", "apple"),
      liquid_entity("water"),
      liquid_entity("coffee"),
  };
  return std::make_shared<const World>(grid, e, Profile::Restaurant);
}

/// Slots in line_world().
enum LineSlots { kSink = 0, kTable = 1, kWater = 2, kCoffee = 3, kCup = 0, kBowl = 1, kApple = 2 };

/// Robot at the sink; everything on the table, clean and empty.
inline WorldState line_state() {
  return WorldState(line_world(), {0, 0}, {{kTable, 0, -1}, {kTable, 0, -1}, {kTable, 0, -1}});
}

/// Sink at (0,0), table at (2,0), no coffee machine; a dirty cup of coffee
/// stands on the table. Washing it makes coffee tasks unsolvable.
inline WorldState stale_coffee_state() {
  const auto grid = OccupancyGrid::from_rows({"...."});
  std::vector<Entity> e{Entity{"robot", "robot", EntityKind::Robot, Cell{0, 0}, {}, {}},
                        container_entity("sink", "sink", {0, 0}), container_entity("table", "table", {2, 0}),
                        object_entity("cup1", "cup"), liquid_entity("water"), liquid_entity("coffee")};
  return WorldState(std::make_shared<const World>(grid, e, Profile::Restaurant), {0, 0}, {{1, 1, 1}});
}

inline Predicate pred(const World& w, PredicateName name, const std::string& a, const std::string& b = {}) {
  return Predicate::make(name, w.require(a), b.empty() ? EntityId{} : w.require(b));
}

struct TinyInstance {
  WorldState state;
  TaskDistribution dist;
};

struct TinyOptions {
  int max_containers = 3;  ///< a sink plus up to two others
  int max_objects = 3;
  int max_tasks = 4;
};

/// Random restaurant world on a 6x4 grid: one sink always present, up to two
/// more containers, up to three objects, water and coffee liquids, robot at a
/// container. Tasks are random solvable conjunctions of one or two goals.
inline TinyInstance make_tiny(std::uint64_t seed, const TinyOptions& opt = {}) {
  Rng rng(seed);
  for (;;) {
    OccupancyGrid grid(6, 4);
    const int blocks = rng.range(0, 3);
    for (int b = 0; b < blocks; ++b) grid.set_blocked({rng.range(0, 5), rng.range(0, 3)}, true);
    if (!connected(grid)) continue;

    std::vector<Cell> free_cells;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!grid.blocked(grid.cell(i))) free_cells.push_back(grid.cell(i));
    rng.shuffle(free_cells);

    std::vector<std::string> others{"water-dispenser", "coffee-machine", "table", "counter"};
    rng.shuffle(others);
    const int n_containers = rng.range(2, std::max(2, opt.max_containers));
    std::vector<Entity> entities;
    entities.push_back(Entity{"robot", "robot", EntityKind::Robot, free_cells[0], {}, {}});
    entities.push_back(container_entity("sink", "sink", free_cells[0]));
    for (int c = 1; c < n_containers; ++c) entities.push_back(container_entity(others[c - 1], others[c - 1], free_cells[c]));

    const std::vector<std::string> kinds{"cup", "bowl", "apple"};
    const int n_objects = rng.range(1, opt.max_objects);
    for (int o = 0; o < n_objects; ++o) {
      const std::string name = kinds[rng.index(kinds.size())];
      entities.push_back(object_entity(name + std::to_string(o + 1), name));
    }
    entities.push_back(liquid_entity("water"));
    entities.push_back(liquid_entity("coffee"));
    // Robot starts at a random container.
    entities[0].cell = free_cells[rng.index(static_cast<std::size_t>(n_containers))];

    auto world = std::make_shared<const World>(grid, entities, Profile::Restaurant);
    std::vector<ObjectState> objects;
    for (int o = 0; o < n_objects; ++o) {
      ObjectState s;
      s.location = static_cast<std::uint8_t>(rng.index(static_cast<std::size_t>(n_containers)));
      if (world->washable(o)) s.dirty = rng.bernoulli(0.5) ? 1 : 0;
      if (world->fillable(o) && rng.bernoulli(0.3)) s.liquid = static_cast<std::int8_t>(rng.index(2));
      objects.push_back(s);
    }
    WorldState s0(world, *entities[0].cell, objects);

    std::vector<Predicate> pool;
    const World& w = *world;
    for (int o = 0; o < n_objects; ++o) {
      const EntityId id = w.objects()[o];
      for (int c = 0; c < n_containers; ++c) pool.push_back(Predicate::make(PredicateName::In, id, w.containers()[c]));
      if (w.washable(o)) pool.push_back(Predicate::make(PredicateName::Clean, id));
      if (w.fillable(o))
        for (EntityId l : w.liquids()) pool.push_back(Predicate::make(PredicateName::FilledWith, id, l));
    }
    for (int c = 0; c < n_containers; ++c) {
      pool.push_back(Predicate::make(PredicateName::Empty, w.containers()[c]));
      pool.push_back(Predicate::make(PredicateName::At, w.robot(), w.containers()[c]));
    }

    std::vector<TaskSpec> tasks;
    const int n_tasks = rng.range(1, opt.max_tasks);
    for (int attempt = 0; attempt < 40 && static_cast<int>(tasks.size()) < n_tasks; ++attempt) {
      std::vector<Predicate> goal{pool[rng.index(pool.size())]};
      if (rng.bernoulli(0.5)) goal.push_back(pool[rng.index(pool.size())]);
      TaskSpec task(goal, "task" + std::to_string(tasks.size()));
      if (std::find(tasks.begin(), tasks.end(), task) != tasks.end()) continue;
      try {
        task_plan(s0, task);
      } catch (const Error&) {
        continue;
      }
      tasks.push_back(task);
    }
    if (tasks.empty()) continue;

    TaskDistribution dist;
    std::vector<double> raw;
    for (std::size_t i = 0; i < tasks.size(); ++i) raw.push_back(1.0 + rng.index(9));
    double sum = 0.0;
    for (double r : raw) sum += r;
    double assigned = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const double weight = i + 1 == tasks.size() ? 1.0 - assigned : raw[i] / sum;
      assigned += weight;
      dist.entries.push_back({tasks[i], weight});
    }
    return {s0, dist};
  }
}

}  // namespace antplan::testkit
