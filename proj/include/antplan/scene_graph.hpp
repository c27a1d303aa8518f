#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "antplan/world.hpp"

namespace antplan {

/// Node feature layout: name one-hot, kind one-hot, normalized (x, y), attribute bits.
struct FeatureSpec {
  Profile profile = Profile::Restaurant;
  std::vector<std::string> names;

  static FeatureSpec for_profile(Profile profile);

  int name_count() const { return static_cast<int>(names.size()); }
  int kind_offset() const { return name_count(); }
  int position_offset() const { return kind_offset() + kNumKinds; }
  int attribute_offset() const { return position_offset() + 2; }
  int length() const { return attribute_offset() + kNumAttributes; }
  /// Index of `name` in the vocabulary, or -1.
  int name_index(const std::string& name) const;
};

/// Restaurant category vocabulary (25 names).
const std::vector<std::string>& restaurant_vocabulary();
/// Home category vocabulary.
const std::vector<std::string>& home_vocabulary();

struct SceneGraph {
  Eigen::MatrixXd features;               ///< one row per node
  std::vector<std::pair<int, int>> edges;  ///< directed (src, dst); both directions present

  int node_count() const { return static_cast<int>(features.rows()); }
};

/// Node order: root, rooms, containers, objects, liquids, robot. Containers
/// hang off their room (or the root in room-less worlds), objects off their
/// container or the robot when held, liquids off their first source
/// container, and the robot off the room of its cell. A filled object is
/// also linked to its liquid. Throws unknown-name.
SceneGraph convert_to_graph(const WorldState& state, const FeatureSpec& spec);

}  // namespace antplan
