#include "antplan/scene_graph.hpp"

#include <algorithm>

#include "antplan/error.hpp"

namespace antplan {

const std::vector<std::string>& restaurant_vocabulary() {
  static const std::vector<std::string> names{
      "kitchen", "serving-room", "robot", "sink",  "water-dispenser", "coffee-machine", "counter",
      "cabinet", "shelf",        "table", "cup",   "mug",             "glass",          "jar",
      "bowl",    "plate",        "fork",  "knife", "spoon",           "apple",          "banana",
      "orange",  "water",        "coffee", "dish-rack"};
  return names;
}

const std::vector<std::string>& home_vocabulary() {
  static const std::vector<std::string> names{
      "living-room", "bedroom", "bathroom", "kitchen", "office", "robot",  "table",  "shelf", "cabinet",
      "sofa",        "bed",     "dresser",  "counter", "desk",   "book",   "pillow", "remote", "laptop",
      "cup",         "plate",   "apple",    "keys",    "towel",  "vase",   "box"};
  return names;
}

FeatureSpec FeatureSpec::for_profile(Profile profile) {
  return FeatureSpec{profile, profile == Profile::Home ? home_vocabulary() : restaurant_vocabulary()};
}

int FeatureSpec::name_index(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

SceneGraph convert_to_graph(const WorldState& state, const FeatureSpec& spec) {
  const World& w = state.world();
  const auto& grid = w.grid();
  const double sx = grid.width() > 1 ? 1.0 / (grid.width() - 1) : 0.0;
  const double sy = grid.height() > 1 ? 1.0 / (grid.height() - 1) : 0.0;

  const int n_rooms = static_cast<int>(w.rooms().size());
  const int n_containers = static_cast<int>(w.containers().size());
  const int n_objects = static_cast<int>(w.objects().size());
  const int n_liquids = static_cast<int>(w.liquids().size());
  const int room0 = 1;
  const int container0 = room0 + n_rooms;
  const int object0 = container0 + n_containers;
  const int liquid0 = object0 + n_objects;
  const int robot_node = liquid0 + n_liquids;

  SceneGraph g;
  g.features = Eigen::MatrixXd::Zero(robot_node + 1, spec.length());
  auto set_position = [&](int node, Cell c) {
    g.features(node, spec.position_offset()) = c.x * sx;
    g.features(node, spec.position_offset() + 1) = c.y * sy;
  };
  auto set_entity = [&](int node, const Entity& e) {
    const int name = spec.name_index(e.name);
    if (name < 0)
      throw Error(ErrorKind::UnknownName, "entity '" + e.id + "' has name '" + e.name +
                                              "' outside the " + to_string(spec.profile) + " vocabulary");
    g.features(node, name) = 1.0;
    g.features(node, spec.kind_offset() + static_cast<int>(e.kind)) = 1.0;
    for (int a = 0; a < kNumAttributes; ++a)
      if (e.attributes.test(a)) g.features(node, spec.attribute_offset() + a) = 1.0;
  };
  auto set_attribute = [&](int node, Attribute a) {
    g.features(node, spec.attribute_offset() + static_cast<int>(a)) = 1.0;
  };
  auto link = [&](int a, int b) {
    g.edges.emplace_back(a, b);
    g.edges.emplace_back(b, a);
  };

  g.features(0, spec.position_offset()) = 0.5;
  g.features(0, spec.position_offset() + 1) = 0.5;

  for (int r = 0; r < n_rooms; ++r) {
    const Entity& e = w.entity(w.rooms()[r]);
    set_entity(room0 + r, e);
    if (e.cell) set_position(room0 + r, *e.cell);
    link(0, room0 + r);
  }
  auto room_node = [&](EntityId room) {
    for (int r = 0; r < n_rooms; ++r)
      if (w.rooms()[r] == room) return room0 + r;
    return 0;
  };

  std::vector<int> counts(n_containers, 0);
  for (const ObjectState& s : state.objects())
    if (s.location != kHeld) ++counts[s.location];
  for (int c = 0; c < n_containers; ++c) {
    const Entity& e = w.container(c);
    set_entity(container0 + c, e);
    set_position(container0 + c, w.container_cell(c));
    if (counts[c] == 0) set_attribute(container0 + c, Attribute::IsEmpty);
    link(room_node(e.room), container0 + c);
  }

  const Cell robot = state.robot_cell();
  for (int o = 0; o < n_objects; ++o) {
    const ObjectState& s = state.object(o);
    const int node = object0 + o;
    set_entity(node, w.object(o));
    set_position(node, s.location == kHeld ? robot : w.container_cell(s.location));
    if (s.dirty) set_attribute(node, Attribute::IsDirty);
    if (w.fillable(o) && s.liquid < 0) set_attribute(node, Attribute::IsEmpty);
    link(s.location == kHeld ? robot_node : container0 + s.location, node);
    if (s.liquid >= 0) link(node, liquid0 + s.liquid);
  }

  for (int l = 0; l < n_liquids; ++l) {
    const int node = liquid0 + l;
    set_entity(node, w.entity(w.liquids()[l]));
    const std::vector<int>* sources = l == w.water_slot() ? &w.water_sources()
                                      : l == w.coffee_slot() ? &w.coffee_sources()
                                                             : nullptr;
    if (sources && !sources->empty()) {
      set_position(node, w.container_cell(sources->front()));
      link(container0 + sources->front(), node);
    } else {
      link(0, node);
    }
  }

  set_entity(robot_node, w.entity(w.robot()));
  set_position(robot_node, robot);
  link(n_rooms > 0 ? room_node(w.room_of_cell(robot)) : 0, robot_node);
  return g;
}

}  // namespace antplan
