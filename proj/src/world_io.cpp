#include "antplan/world_io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include <json.hpp>

#include "antplan/error.hpp"

namespace antplan {

using nlohmann::json;

namespace {

// Input iterator that counts newlines as the JSON lexer consumes characters.
class LineCountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  LineCountingIterator(const char* p, int* line) : p_(p), line_(line) {}
  reference operator*() const { return *p_; }
  LineCountingIterator& operator++() {
    if (*p_ == '\n') ++*line_;
    ++p_;
    return *this;
  }
  LineCountingIterator operator++(int) {
    auto copy = *this;
    ++*this;
    return copy;
  }
  friend bool operator==(const LineCountingIterator& a, const LineCountingIterator& b) {
    return a.p_ == b.p_;
  }
  friend bool operator!=(const LineCountingIterator& a, const LineCountingIterator& b) {
    return a.p_ != b.p_;
  }

 private:
  const char* p_;
  int* line_;
};

// Parsed document plus the source line where each object/array begins,
// keyed by JSON pointer ("/entities/3").
struct Located {
  json doc;
  std::map<std::string, int> lines;
  std::string source;

  int line(const std::string& pointer) const {
    auto it = lines.find(pointer);
    return it == lines.end() ? 0 : it->second;
  }
  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    throw Error(ErrorKind::InvalidWorld, source + ":" + std::to_string(line(pointer)) + ": " + what);
  }
};

Located parse_located(const std::string& text, const std::string& source) {
  Located out;
  out.source = source;
  int line = 1;
  struct Frame {
    std::string pointer;
    bool array = false;
    std::size_t index = 0;
    std::string key;
  };
  std::vector<Frame> stack;
  auto child_pointer = [&stack]() -> std::string {
    if (stack.empty()) return "";
    const Frame& top = stack.back();
    return top.pointer + "/" + (top.array ? std::to_string(top.index) : top.key);
  };
  auto finish_element = [&stack]() {
    if (!stack.empty() && stack.back().array) ++stack.back().index;
  };
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::key:
        if (!stack.empty()) stack.back().key = parsed.get<std::string>();
        break;
      case json::parse_event_t::object_start:
      case json::parse_event_t::array_start: {
        std::string p = child_pointer();
        out.lines.emplace(p, line);
        stack.push_back({std::move(p), event == json::parse_event_t::array_start, 0, {}});
        break;
      }
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        stack.pop_back();
        finish_element();
        break;
      case json::parse_event_t::value:
        if (!stack.empty() && stack.back().array) {
          out.lines.emplace(child_pointer(), line);
          finish_element();
        } else if (!stack.empty()) {
          out.lines.emplace(child_pointer(), line);
        }
        break;
    }
    return true;
  };
  try {
    out.doc = json::parse(LineCountingIterator(text.data(), &line),
                          LineCountingIterator(text.data() + text.size(), &line), cb);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidWorld, source + ":" + std::to_string(line) + ": " + e.what());
  }
  return out;
}

const json& member(const Located& loc, const json& obj, const std::string& pointer,
                   const std::string& key) {
  if (!obj.is_object()) loc.fail(pointer, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) loc.fail(pointer, "missing field '" + key + "'");
  return *it;
}

std::string string_member(const Located& loc, const json& obj, const std::string& pointer,
                          const std::string& key) {
  const json& v = member(loc, obj, pointer, key);
  if (!v.is_string()) loc.fail(pointer + "/" + key, "field '" + key + "' must be a string");
  return v.get<std::string>();
}

void check_format(const Located& loc, const std::string& expected) {
  const std::string format = string_member(loc, loc.doc, "", "format");
  if (format != expected) loc.fail("/format", "expected format '" + expected + "', got '" + format + "'");
  const json& version = member(loc, loc.doc, "", "version");
  if (!version.is_number_integer() || version.get<int>() != 1)
    loc.fail("/version", "unsupported version (expected 1)");
}

Cell parse_cell(const Located& loc, const json& v, const std::string& pointer) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    loc.fail(pointer, "cell must be [x, y] integers");
  return {v[0].get<int>(), v[1].get<int>()};
}

Predicate parse_predicate_json(const Located& loc, const json& v, const std::string& pointer,
                               const World& world) {
  if (!v.is_array() || v.empty()) loc.fail(pointer, "fact must be a non-empty array");
  std::vector<std::string> tokens;
  for (const json& t : v) {
    if (!t.is_string()) loc.fail(pointer, "fact entries must be strings");
    tokens.push_back(t.get<std::string>());
  }
  try {
    return parse_predicate(tokens, world);
  } catch (const Error& e) {
    loc.fail(pointer, e.what());
  }
}

Cost parse_cost(const Located& loc, const json& v, const std::string& pointer) {
  if (!v.is_number() || !(v.get<double>() >= 0.0)) loc.fail(pointer, "cost must be a nonnegative number");
  return Cost::from_units(v.get<double>());
}

// Locates the line of the first entity quoted in an error message.
int line_of_quoted_entity(const Located& loc, const std::string& message) {
  const auto open = message.find('\'');
  if (open == std::string::npos) return 0;
  const auto close = message.find('\'', open + 1);
  if (close == std::string::npos) return 0;
  const std::string id = message.substr(open + 1, close - open - 1);
  const json& entities = loc.doc.value("entities", json::array());
  for (std::size_t i = 0; i < entities.size(); ++i)
    if (entities[i].is_object() && entities[i].value("id", "") == id)
      return loc.line("/entities/" + std::to_string(i));
  return 0;
}

}  // namespace

Predicate parse_predicate(const std::vector<std::string>& tokens, const World& world) {
  if (tokens.empty()) throw Error(ErrorKind::InvalidArgument, "empty predicate");
  const auto name = parse_predicate_name(tokens[0]);
  if (!name) throw Error(ErrorKind::InvalidArgument, "unknown predicate '" + tokens[0] + "'");
  const int n = arity(*name);
  if (static_cast<int>(tokens.size()) != n + 1)
    throw Error(ErrorKind::InvalidArgument, "predicate '" + tokens[0] + "' takes " +
                                                std::to_string(n) + " argument(s)");
  Predicate p;
  p.name = *name;
  for (int i = 0; i < n; ++i) p.args[i] = world.require(tokens[i + 1]);
  return p;
}

WorldState parse_world(const std::string& text, const std::string& source) {
  const Located loc = parse_located(text, source);
  check_format(loc, "antplan-world");
  const json& doc = loc.doc;

  const auto profile = parse_profile(string_member(loc, doc, "", "profile"));
  if (!profile) loc.fail("/profile", "profile must be 'home' or 'restaurant'");

  std::optional<int> capacity;
  if (auto it = doc.find("capacity_limit"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<int>() < 1)
      loc.fail("/capacity_limit", "capacity_limit must be a positive integer or null");
    capacity = it->get<int>();
  }

  ActionCosts costs;
  if (auto it = doc.find("costs"); it != doc.end()) {
    if (!it->is_object()) loc.fail("/costs", "costs must be an object");
    for (auto& [key, value] : it->items()) {
      const std::string p = "/costs/" + key;
      if (key == "pick") costs.pick = parse_cost(loc, value, p);
      else if (key == "place") costs.place = parse_cost(loc, value, p);
      else if (key == "wash") costs.wash = parse_cost(loc, value, p);
      else if (key == "fill") costs.fill = parse_cost(loc, value, p);
      else if (key == "make-coffee") costs.make_coffee = parse_cost(loc, value, p);
      else if (key == "clear") costs.clear = parse_cost(loc, value, p);
      else loc.fail(p, "unknown action cost '" + key + "'");
    }
  }

  const json& grid_doc = member(loc, doc, "", "grid");
  const json& rows_doc = member(loc, grid_doc, "/grid", "rows");
  if (!rows_doc.is_array()) loc.fail("/grid/rows", "rows must be an array of strings");
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < rows_doc.size(); ++i) {
    if (!rows_doc[i].is_string()) loc.fail("/grid/rows/" + std::to_string(i), "row must be a string");
    rows.push_back(rows_doc[i].get<std::string>());
  }
  double cell_size = 1.0;
  if (auto it = grid_doc.find("cell_size"); it != grid_doc.end()) {
    if (!it->is_number() || !(it->get<double>() > 0.0)) loc.fail("/grid/cell_size", "cell_size must be positive");
    cell_size = it->get<double>();
  }
  OccupancyGrid grid;
  try {
    grid = OccupancyGrid::from_rows(rows, cell_size);
  } catch (const Error& e) {
    loc.fail("/grid", e.what());
  }

  const json& ents = member(loc, doc, "", "entities");
  if (!ents.is_array()) loc.fail("/entities", "entities must be an array");
  std::vector<Entity> entities;
  std::vector<std::string> room_names;
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < ents.size(); ++i) {
    const std::string p = "/entities/" + std::to_string(i);
    const json& e = ents[i];
    Entity ent;
    ent.id = string_member(loc, e, p, "id");
    ent.name = string_member(loc, e, p, "name");
    if (seen.count(ent.id)) loc.fail(p, "duplicate entity id '" + ent.id + "'");
    seen.emplace(ent.id, i);
    const auto kind = parse_kind(string_member(loc, e, p, "kind"));
    if (!kind) loc.fail(p + "/kind", "entity '" + ent.id + "': kind must be robot, room, container or object");
    ent.kind = *kind;
    if (auto it = e.find("cell"); it != e.end() && !it->is_null()) {
      if (ent.kind == EntityKind::Object) loc.fail(p + "/cell", "entity '" + ent.id + "': objects carry no cell");
      ent.cell = parse_cell(loc, *it, p + "/cell");
      if (!grid.in_bounds(*ent.cell)) loc.fail(p + "/cell", "entity '" + ent.id + "': cell out of bounds");
      if (grid.blocked(*ent.cell)) loc.fail(p + "/cell", "entity '" + ent.id + "': cell is blocked");
    } else if (ent.kind != EntityKind::Object) {
      loc.fail(p, "entity '" + ent.id + "' (" + to_string(ent.kind) + ") needs a cell");
    }
    if (auto it = e.find("attributes"); it != e.end()) {
      if (!it->is_array()) loc.fail(p + "/attributes", "attributes must be an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        const json& a = (*it)[k];
        const std::string ap = p + "/attributes/" + std::to_string(k);
        if (!a.is_string()) loc.fail(ap, "attribute must be a string");
        const auto attr = parse_attribute(a.get<std::string>());
        if (!attr) loc.fail(ap, "entity '" + ent.id + "': unknown attribute '" + a.get<std::string>() + "'");
        if (*attr == Attribute::IsDirty || *attr == Attribute::IsEmpty)
          loc.fail(ap, "entity '" + ent.id + "': " + a.get<std::string>() + " is derived from facts");
        ent.attributes.set(static_cast<std::size_t>(*attr));
      }
    }
    room_names.push_back(e.contains("room") && e["room"].is_string() ? e["room"].get<std::string>() : "");
    entities.push_back(std::move(ent));
  }
  Cell robot_cell;
  bool has_robot = false;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const std::string p = "/entities/" + std::to_string(i);
    if (entities[i].kind == EntityKind::Robot) {
      if (has_robot) loc.fail(p, "more than one robot");
      has_robot = true;
      robot_cell = *entities[i].cell;
    }
    if (entities[i].kind == EntityKind::Container && !room_names[i].empty()) {
      auto it = seen.find(room_names[i]);
      if (it == seen.end() || entities[it->second].kind != EntityKind::Room)
        loc.fail(p + "/room", "container '" + entities[i].id + "': unknown room '" + room_names[i] + "'");
      entities[i].room = EntityId{static_cast<std::int32_t>(it->second)};
    }
  }
  if (!has_robot) loc.fail("/entities", "world has no robot");

  EntityId disposal;
  if (auto it = doc.find("disposal"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) loc.fail("/disposal", "disposal must be a container id");
    auto found = seen.find(it->get<std::string>());
    if (found == seen.end() || entities[found->second].kind != EntityKind::Container)
      loc.fail("/disposal", "disposal '" + it->get<std::string>() + "' is not a container");
    disposal = EntityId{static_cast<std::int32_t>(found->second)};
  }

  std::shared_ptr<const World> world;
  try {
    world = std::make_shared<const World>(std::move(grid), std::move(entities), *profile, capacity,
                                          costs, disposal);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidWorld,
                source + ":" + std::to_string(line_of_quoted_entity(loc, e.what())) + ": " + e.what());
  }

  const json& facts_doc = member(loc, doc, "", "facts");
  if (!facts_doc.is_array()) loc.fail("/facts", "facts must be an array");
  FactSet facts;
  for (std::size_t i = 0; i < facts_doc.size(); ++i)
    facts.insert(parse_predicate_json(loc, facts_doc[i], "/facts/" + std::to_string(i), *world));
  try {
    return WorldState::from_facts(world, robot_cell, facts);
  } catch (const Error& e) {
    int line = 0;
    // Point at the first fact mentioning the quoted entity, else at the entity.
    const std::string msg = e.what();
    const auto open = msg.find('\'');
    if (open != std::string::npos) {
      const std::string id = msg.substr(open + 1, msg.find('\'', open + 1) - open - 1);
      for (std::size_t i = 0; i < facts_doc.size() && line == 0; ++i)
        for (const json& t : facts_doc[i])
          if (t.is_string() && t.get<std::string>() == id) line = loc.line("/facts/" + std::to_string(i));
    }
    if (line == 0) line = line_of_quoted_entity(loc, msg);
    if (line == 0) line = loc.line("/facts");
    throw Error(ErrorKind::InvalidWorld, source + ":" + std::to_string(line) + ": " + msg);
  }
}

std::string dump_world(const WorldState& state) {
  const World& w = state.world();
  json doc = json::object();
  doc["format"] = "antplan-world";
  doc["version"] = 1;
  doc["profile"] = to_string(w.profile());
  doc["capacity_limit"] = w.capacity_limit() ? json(*w.capacity_limit()) : json(nullptr);
  if (w.disposal_slot() >= 0) doc["disposal"] = w.container(w.disposal_slot()).id;
  const ActionCosts& c = w.costs();
  doc["costs"] = {{"pick", c.pick.units()},   {"place", c.place.units()},
                  {"wash", c.wash.units()},   {"fill", c.fill.units()},
                  {"make-coffee", c.make_coffee.units()}, {"clear", c.clear.units()}};
  doc["grid"] = {{"cell_size", w.grid().cell_size()}, {"rows", w.grid().to_rows()}};
  json ents = json::array();
  for (const Entity& e : w.entities()) {
    json je = json::object();
    je["id"] = e.id;
    je["name"] = e.name;
    je["kind"] = to_string(e.kind);
    const std::optional<Cell> cell = e.kind == EntityKind::Robot ? std::optional<Cell>(state.robot_cell()) : e.cell;
    if (cell) je["cell"] = {cell->x, cell->y};
    if (e.kind == EntityKind::Container && e.room.valid()) je["room"] = w.entity(e.room).id;
    json attrs = json::array();
    for (int a = 0; a < kNumAttributes; ++a)
      if (e.attributes.test(a)) attrs.push_back(to_string(static_cast<Attribute>(a)));
    if (!attrs.empty()) je["attributes"] = attrs;
    ents.push_back(std::move(je));
  }
  doc["entities"] = std::move(ents);
  json facts = json::array();
  for (const Predicate& p : state.facts()) {
    if (p.name == PredicateName::At || p.name == PredicateName::HandEmpty ||
        p.name == PredicateName::ServedAt)
      continue;
    if (p.name == PredicateName::Empty && w.container_slot(p.args[0]) >= 0) continue;
    json f = json::array({to_string(p.name)});
    for (int i = 0; i < arity(p.name); ++i) f.push_back(w.entity(p.args[i]).id);
    facts.push_back(std::move(f));
  }
  doc["facts"] = std::move(facts);
  return doc.dump(2) + "\n";
}

WorldState load_world(const std::filesystem::path& path) {
  return parse_world(read_file(path), path.string());
}

void save_world(const WorldState& state, const std::filesystem::path& path) {
  write_file(path, dump_world(state));
}

// ---------------------------------------------------------------------------
// Distributions

void TaskDistribution::validate(const World& world) const {
  if (entries.empty()) throw Error(ErrorKind::InvalidDistribution, "distribution has no tasks");
  double total = 0.0;
  for (const Entry& e : entries) {
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error(ErrorKind::InvalidDistribution, "task '" + e.task.label + "' has a nonpositive weight");
    total += e.weight;
    for (const Predicate& p : e.task.goal)
      for (int i = 0; i < arity(p.name); ++i)
        if (!world.contains(p.args[i]))
          throw Error(ErrorKind::UnknownEntity, "task '" + e.task.label + "' references entity #" +
                                                    std::to_string(p.args[i].value));
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidDistribution, "weights sum to " + std::to_string(total));
}

TaskDistribution TaskDistribution::uniform(std::vector<TaskSpec> tasks) {
  TaskDistribution d;
  const double w = tasks.empty() ? 0.0 : 1.0 / static_cast<double>(tasks.size());
  for (TaskSpec& t : tasks) d.entries.push_back({std::move(t), w});
  return d;
}

TaskDistribution parse_distribution(const std::string& text, const World& world, const std::string& source) {
  const Located loc = parse_located(text, source);
  check_format(loc, "antplan-distribution");
  const json& tasks = member(loc, loc.doc, "", "tasks");
  if (!tasks.is_array()) loc.fail("/tasks", "tasks must be an array");
  TaskDistribution dist;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string p = "/tasks/" + std::to_string(i);
    const json& t = tasks[i];
    const std::string label = string_member(loc, t, p, "label");
    const json& goal = member(loc, t, p, "goal");
    if (!goal.is_array() || goal.empty()) loc.fail(p + "/goal", "task '" + label + "': goal must be a non-empty array");
    std::vector<Predicate> preds;
    for (std::size_t k = 0; k < goal.size(); ++k)
      preds.push_back(parse_predicate_json(loc, goal[k], p + "/goal/" + std::to_string(k), world));
    const json& weight = member(loc, t, p, "weight");
    if (!weight.is_number() || !(weight.get<double>() > 0.0))
      loc.fail(p + "/weight", "task '" + label + "': weight must be positive");
    dist.entries.push_back({TaskSpec(std::move(preds), label), weight.get<double>()});
  }
  try {
    dist.validate(world);
  } catch (const Error& e) {
    throw Error(e.kind(), source + ":" + std::to_string(loc.line("/tasks")) + ": " + e.what());
  }
  return dist;
}

std::string dump_distribution(const TaskDistribution& dist, const World& world) {
  json doc = json::object();
  doc["format"] = "antplan-distribution";
  doc["version"] = 1;
  json tasks = json::array();
  for (const auto& e : dist.entries) {
    json goal = json::array();
    for (const Predicate& p : e.task.goal) {
      json f = json::array({to_string(p.name)});
      for (int i = 0; i < arity(p.name); ++i) f.push_back(world.entity(p.args[i]).id);
      goal.push_back(std::move(f));
    }
    tasks.push_back({{"label", e.task.label}, {"goal", std::move(goal)}, {"weight", e.weight}});
  }
  doc["tasks"] = std::move(tasks);
  return doc.dump(2) + "\n";
}

TaskDistribution load_distribution(const std::filesystem::path& path, const World& world) {
  return parse_distribution(read_file(path), world, path.string());
}

void save_distribution(const TaskDistribution& dist, const World& world, const std::filesystem::path& path) {
  write_file(path, dump_distribution(dist, world));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << content;
}

}  // namespace antplan
