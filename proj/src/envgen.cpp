#include "antplan/envgen.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "antplan/error.hpp"
#include "antplan/rng.hpp"
#include "antplan/template_table.hpp"

namespace antplan {

using nlohmann::json;

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InfeasibleConfig, why); };
  if (width < 5 || height < 4) fail("grid must be at least 5x4");
  if (profile == Profile::Restaurant && rooms != 0 && rooms != 2) fail("restaurant worlds have exactly 2 rooms");
  if (profile == Profile::Restaurant && capacity_limit) fail("restaurant worlds have no capacity limit");
  if (profile == Profile::Home && capacity_limit && *capacity_limit != kHomeCapacity)
    fail("home worlds use capacity " + std::to_string(kHomeCapacity));
  if (rooms < 0 || rooms > 5) fail("rooms must lie in 0..5");
  if (containers < 0 || objects < 0) fail("counts must be nonnegative");
  if (profile == Profile::Restaurant && containers != 0 && containers < 5)
    fail("restaurant worlds need at least 5 containers (3 fixtures, 2 tables)");
  if (min_tasks < 1 || max_tasks < min_tasks) fail("task range must satisfy 1 <= min <= max");
  if (dirty_probability < 0 || dirty_probability > 1 || filled_probability < 0 || filled_probability > 1)
    fail("probabilities must lie in [0, 1]");
  probe_budget.validate();
}

// ---------------------------------------------------------------------------
// Templates

namespace {

std::vector<TaskTemplate> templates_from_json(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "antplan-task-templates")
    throw Error(ErrorKind::InvalidArgument, "not a task template table");
  auto attributes = [](const json& list) {
    std::vector<Attribute> out;
    for (const auto& a : list) {
      const auto parsed = parse_attribute(a.get<std::string>());
      if (!parsed) throw Error(ErrorKind::InvalidArgument, "unknown attribute " + a.dump());
      out.push_back(*parsed);
    }
    return out;
  };
  std::vector<TaskTemplate> out;
  for (const auto& t : doc.at("templates")) {
    TaskTemplate tmpl;
    tmpl.name = t.at("name").get<std::string>();
    for (const auto& p : t.at("profiles")) {
      const auto profile = parse_profile(p.get<std::string>());
      if (!profile) throw Error(ErrorKind::InvalidArgument, "unknown profile " + p.dump());
      tmpl.profiles.push_back(*profile);
    }
    for (const auto& p : t.at("params")) {
      TaskTemplate::Param param;
      param.var = p.at("var").get<std::string>();
      const auto kind = parse_kind(p.at("kind").get<std::string>());
      if (!kind || (*kind != EntityKind::Object && *kind != EntityKind::Container))
        throw Error(ErrorKind::InvalidArgument, "template parameters bind objects or containers");
      param.kind = *kind;
      if (p.contains("names")) param.names = p["names"].get<std::vector<std::string>>();
      if (p.contains("attributes")) param.attributes = attributes(p["attributes"]);
      if (p.contains("exclude_attributes")) param.exclude_attributes = attributes(p["exclude_attributes"]);
      tmpl.params.push_back(std::move(param));
    }
    for (const auto& g : t.at("goal")) tmpl.goal.push_back(g.get<std::vector<std::string>>());
    out.push_back(std::move(tmpl));
  }
  return out;
}

}  // namespace

std::vector<TaskTemplate> parse_task_templates(const std::string& json_text) {
  try {
    return templates_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("invalid task template table: ") + e.what());
  }
}

const std::vector<TaskTemplate>& task_templates() {
  static const std::vector<TaskTemplate> table = parse_task_templates(detail::kTemplateTableJson);
  return table;
}

std::vector<TaskSpec> instantiate(const TaskTemplate& tmpl, const World& world) {
  if (std::find(tmpl.profiles.begin(), tmpl.profiles.end(), world.profile()) == tmpl.profiles.end())
    return {};
  std::vector<std::vector<EntityId>> domains;
  for (const auto& param : tmpl.params) {
    const auto& pool = param.kind == EntityKind::Object ? world.objects() : world.containers();
    std::vector<EntityId> domain;
    for (EntityId id : pool) {
      const Entity& e = world.entity(id);
      if (!param.names.empty() && std::find(param.names.begin(), param.names.end(), e.name) == param.names.end())
        continue;
      if (!std::all_of(param.attributes.begin(), param.attributes.end(), [&](Attribute a) { return e.has(a); }))
        continue;
      if (std::any_of(param.exclude_attributes.begin(), param.exclude_attributes.end(),
                      [&](Attribute a) { return e.has(a); }))
        continue;
      domain.push_back(id);
    }
    if (domain.empty()) return {};
    domains.push_back(std::move(domain));
  }

  // Literal tokens resolve to the first entity with that category name.
  std::map<std::string, EntityId> literals;
  for (const auto& g : tmpl.goal) {
    for (std::size_t i = 1; i < g.size(); ++i) {
      const bool is_var = std::any_of(tmpl.params.begin(), tmpl.params.end(),
                                      [&](const auto& p) { return p.var == g[i]; });
      if (is_var || literals.count(g[i])) continue;
      const auto& ents = world.entities();
      const auto it = std::find_if(ents.begin(), ents.end(), [&](const Entity& e) { return e.name == g[i]; });
      if (it == ents.end()) return {};
      literals[g[i]] = EntityId{static_cast<std::int32_t>(it - ents.begin())};
    }
  }

  std::vector<TaskSpec> out;
  std::vector<std::size_t> pick(domains.size(), 0);
  while (true) {
    std::map<std::string, EntityId> binding = literals;
    std::vector<EntityId> bound;
    for (std::size_t i = 0; i < domains.size(); ++i) {
      binding[tmpl.params[i].var] = domains[i][pick[i]];
      bound.push_back(domains[i][pick[i]]);
    }
    std::vector<EntityId> sorted = bound;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) {
      std::vector<Predicate> goal;
      for (const auto& g : tmpl.goal) {
        const auto name = parse_predicate_name(g.at(0));
        if (!name || static_cast<int>(g.size()) != arity(*name) + 1)
          throw Error(ErrorKind::InvalidArgument, "template " + tmpl.name + " has a malformed goal");
        Predicate p{*name, {}};
        for (int i = 0; i < arity(*name); ++i) p.args[i] = binding.at(g[i + 1]);
        goal.push_back(p);
      }
      std::string label = tmpl.name + "(";
      for (std::size_t i = 0; i < bound.size(); ++i) label += (i ? ", " : "") + world.entity(bound[i]).id;
      out.emplace_back(std::move(goal), label + ")");
    }
    std::size_t i = domains.size();
    while (i > 0 && ++pick[i - 1] == domains[i - 1].size()) pick[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Worlds

namespace {

struct RoomLayout {
  int x0, x1;  // inclusive column range
};

struct Builder {
  std::vector<Entity> entities;
  EntityId add(Entity e) {
    entities.push_back(std::move(e));
    return EntityId{static_cast<std::int32_t>(entities.size() - 1)};
  }
};

AttributeSet attrs(std::initializer_list<Attribute> list) {
  AttributeSet s;
  for (Attribute a : list) s.set(static_cast<std::size_t>(a));
  return s;
}

AttributeSet restaurant_container_attributes(const std::string& name) {
  if (name == "sink") return attrs({Attribute::IsSink});
  if (name == "water-dispenser") return attrs({Attribute::IsWaterSource});
  if (name == "coffee-machine") return attrs({Attribute::IsCoffeeSource});
  if (name == "table" || name == "counter" || name == "shelf") return attrs({Attribute::IsSurface});
  return {};
}

AttributeSet restaurant_object_attributes(const std::string& name) {
  if (name == "cup" || name == "mug" || name == "glass" || name == "jar")
    return attrs({Attribute::IsFillable, Attribute::IsWashable});
  if (name == "bowl" || name == "plate" || name == "fork" || name == "knife" || name == "spoon")
    return attrs({Attribute::IsWashable});
  return {};
}

}  // namespace

WorldState generate_world(const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const bool restaurant = cfg.profile == Profile::Restaurant;
  const int n_rooms = restaurant ? 2 : (cfg.rooms ? cfg.rooms : rng.range(2, 5));
  const int n_containers = cfg.containers ? cfg.containers : rng.range(6, 10);
  const int n_objects = cfg.objects ? cfg.objects : rng.range(8, 15);
  const int W = cfg.width;
  const int H = cfg.height;

  // Vertical strips separated by one-cell walls, each with a doorway.
  const int usable = W - (n_rooms - 1);
  if (usable < 2 * n_rooms) throw Error(ErrorKind::InfeasibleConfig, "grid too narrow for the rooms");
  std::vector<RoomLayout> layout;
  OccupancyGrid grid(W, H, 1.0);
  int x = 0;
  for (int r = 0; r < n_rooms; ++r) {
    const int span = usable / n_rooms + (r < usable % n_rooms ? 1 : 0);
    layout.push_back({x, x + span - 1});
    x += span;
    if (r + 1 < n_rooms) {
      const int door = rng.range(1, H - 2);
      for (int y = 0; y < H; ++y)
        if (y != door) grid.set_blocked({x, y}, true);
      ++x;
    }
  }

  auto perimeter = [&](const RoomLayout& room) {
    std::vector<Cell> cells;
    for (int y = 0; y < H; ++y)
      for (int cx = room.x0; cx <= room.x1; ++cx)
        if (y == 0 || y == H - 1 || cx == room.x0 || cx == room.x1) cells.push_back({cx, y});
    return cells;
  };
  std::vector<std::vector<Cell>> free_perimeter;
  for (const auto& room : layout) {
    auto cells = perimeter(room);
    rng.shuffle(cells);
    free_perimeter.push_back(std::move(cells));
  }

  // A few interior obstacles per room, off the perimeter.
  for (const auto& room : layout) {
    if (room.x1 - room.x0 < 4 || H < 6) continue;
    const int count = rng.range(0, 2);
    for (int i = 0; i < count; ++i) {
      const Cell c{rng.range(room.x0 + 2, room.x1 - 2), rng.range(2, H - 3)};
      grid.set_blocked(c, true);
    }
  }

  Builder b;
  const EntityId robot = b.add({"robot", "robot", EntityKind::Robot, Cell{0, 0}, {}, {}});

  static const std::vector<std::string> kRestaurantRooms{"kitchen", "serving-room"};
  std::vector<std::string> home_rooms{"living-room", "bedroom", "bathroom", "kitchen", "office"};
  if (!restaurant) rng.shuffle(home_rooms);
  std::vector<EntityId> room_ids;
  for (int r = 0; r < n_rooms; ++r) {
    const std::string name = restaurant ? kRestaurantRooms[r] : home_rooms[r];
    Cell center{(layout[r].x0 + layout[r].x1) / 2, H / 2};
    if (grid.blocked(center)) grid.set_blocked(center, false);
    room_ids.push_back(b.add({name, name, EntityKind::Room, center, {}, {}}));
  }

  // Container plan: (name, room index).
  std::vector<std::pair<std::string, int>> plan;
  if (restaurant) {
    const int tables = n_containers >= 8 ? 3 : 2;
    plan = {{"sink", 0}, {"water-dispenser", 0}, {"coffee-machine", 0}};
    for (int t = 0; t < tables; ++t) plan.emplace_back("table", 1);
    static const std::vector<std::string> kExtras{"counter", "dish-rack", "shelf", "cabinet"};
    for (int i = 0; static_cast<int>(plan.size()) < n_containers; ++i) {
      const std::string& name = kExtras[i % kExtras.size()];
      const int room = (name == "counter" || name == "dish-rack") ? 0 : rng.range(0, 1);
      plan.emplace_back(name, room);
    }
  } else {
    static const std::vector<std::string> kHomeContainers{"table", "shelf", "cabinet", "sofa",
                                                          "bed",   "dresser", "counter", "desk"};
    for (int i = 0; i < n_containers; ++i)
      plan.emplace_back(kHomeContainers[rng.index(kHomeContainers.size())],
                        i < n_rooms ? i : rng.range(0, n_rooms - 1));
  }

  std::map<std::string, int> name_counts;
  auto next_id = [&name_counts](const std::string& name) { return name + std::to_string(++name_counts[name]); };

  std::vector<EntityId> container_ids;
  std::vector<std::string> container_names;
  for (const auto& [name, room] : plan) {
    auto& cells = free_perimeter[room];
    while (!cells.empty() && grid.blocked(cells.back())) cells.pop_back();
    if (cells.empty()) throw Error(ErrorKind::InfeasibleConfig, "not enough perimeter cells for containers");
    const Cell cell = cells.back();
    cells.pop_back();
    const AttributeSet a = restaurant ? restaurant_container_attributes(name) : AttributeSet{};
    container_ids.push_back(b.add({next_id(name), name, EntityKind::Container, cell, a, room_ids[room]}));
    container_names.push_back(name);
  }

  // Objects: a guaranteed core so every template has bindings, then random fill.
  std::vector<std::string> object_names;
  if (restaurant) {
    static const std::vector<std::string> kCore{"cup", "mug", "bowl", "apple"};
    static const std::vector<std::string> kPool{"cup",   "mug",  "glass", "jar",   "bowl",   "plate",
                                                "fork",  "knife", "spoon", "apple", "banana", "orange"};
    for (int i = 0; i < n_objects; ++i)
      object_names.push_back(i < static_cast<int>(kCore.size()) ? kCore[i] : kPool[rng.index(kPool.size())]);
  } else {
    static const std::vector<std::string> kPool{"book",  "pillow", "remote", "laptop", "cup",  "plate",
                                                "apple", "keys",   "towel",  "vase",   "box"};
    for (int i = 0; i < n_objects; ++i) object_names.push_back(kPool[rng.index(kPool.size())]);
  }
  for (const auto& name : object_names) {
    const AttributeSet a = restaurant ? restaurant_object_attributes(name) : AttributeSet{};
    b.add({next_id(name), name, EntityKind::Object, std::nullopt, a, {}});
  }
  if (restaurant) {
    b.add({"water", "water", EntityKind::Object, std::nullopt, attrs({Attribute::IsLiquid}), {}});
    b.add({"coffee", "coffee", EntityKind::Object, std::nullopt, attrs({Attribute::IsLiquid}), {}});
  }

  // Repair connectivity: clear obstacles until all container cells see each other.
  auto connected = [&]() {
    const auto field = distance_field(grid, *b.entities[container_ids[0].value].cell, Connectivity::Eight);
    for (EntityId id : container_ids)
      if (!field.reachable(*b.entities[id.value].cell)) return false;
    for (EntityId id : room_ids)
      if (!field.reachable(*b.entities[id.value].cell)) return false;
    return true;
  };
  for (int y = 0; !connected() && y < H; ++y)
    for (const auto& room : layout)
      for (int cx = room.x0; cx <= room.x1; ++cx) grid.set_blocked({cx, y}, false);

  const std::optional<int> capacity =
      restaurant ? std::nullopt : std::optional<int>(cfg.capacity_limit.value_or(kHomeCapacity));

  // Object placement avoids liquid sources.
  std::vector<int> placeable;
  for (int c = 0; c < n_containers; ++c)
    if (container_names[c] != "water-dispenser" && container_names[c] != "coffee-machine") placeable.push_back(c);
  std::vector<int> counts(n_containers, 0);
  std::vector<ObjectState> states;
  for (const auto& name : object_names) {
    std::vector<int> options;
    for (int c : placeable)
      if (!capacity || counts[c] < *capacity) options.push_back(c);
    if (options.empty()) throw Error(ErrorKind::InfeasibleConfig, "objects exceed container capacity");
    const int c = options[rng.index(options.size())];
    ++counts[c];
    ObjectState s;
    s.location = static_cast<std::uint8_t>(c);
    const AttributeSet a = restaurant ? restaurant_object_attributes(name) : AttributeSet{};
    const bool washable = a.test(static_cast<std::size_t>(Attribute::IsWashable));
    const bool fillable = a.test(static_cast<std::size_t>(Attribute::IsFillable));
    if (washable && rng.bernoulli(cfg.dirty_probability)) s.dirty = 1;
    if (fillable && !s.dirty && rng.bernoulli(cfg.filled_probability))
      s.liquid = static_cast<std::int8_t>(rng.index(2));
    states.push_back(s);
  }

  const Cell start = *b.entities[container_ids[rng.index(container_ids.size())].value].cell;
  b.entities[robot.value].cell = start;

  EntityId disposal;
  if (restaurant) disposal = container_ids[0];
  auto world = std::make_shared<const World>(std::move(grid), std::move(b.entities), cfg.profile, capacity,
                                             ActionCosts{}, disposal);
  return WorldState(world, start, std::move(states));
}

TaskDistribution generate_distribution(const WorldState& state, const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  std::vector<std::vector<TaskSpec>> pools;
  for (const TaskTemplate& tmpl : task_templates()) {
    auto tasks = instantiate(tmpl, state.world());
    if (tasks.empty()) continue;
    rng.shuffle(tasks);
    pools.push_back(std::move(tasks));
  }
  const int target = rng.range(cfg.min_tasks, cfg.max_tasks);
  std::vector<TaskSpec> chosen;
  std::vector<std::size_t> next(pools.size(), 0);
  bool progress = true;
  while (static_cast<int>(chosen.size()) < target && progress) {
    progress = false;
    for (std::size_t t = 0; t < pools.size() && static_cast<int>(chosen.size()) < target; ++t) {
      while (next[t] < pools[t].size()) {
        const TaskSpec& task = pools[t][next[t]++];
        progress = true;
        if (satisfies(state, task)) continue;
        try {
          task_plan(state, task, cfg.probe_budget);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::Unsolvable && e.kind() != ErrorKind::BudgetExhausted) throw;
          continue;
        }
        chosen.push_back(task);
        break;
      }
    }
  }
  if (chosen.empty()) throw Error(ErrorKind::NoFeasibleTasks, "no template instantiation is feasible");
  return TaskDistribution::uniform(std::move(chosen));
}

}  // namespace antplan
