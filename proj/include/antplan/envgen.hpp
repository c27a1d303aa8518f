#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "antplan/distribution.hpp"
#include "antplan/planner.hpp"

namespace antplan {

struct GeneratorConfig {
  Profile profile = Profile::Restaurant;
  int width = 20;
  int height = 12;
  /// 0 picks a profile default: 2 for restaurant, 2–5 for home.
  int rooms = 0;
  /// 0 picks uniformly from 6–10 containers and 8–15 objects.
  int containers = 0;
  int objects = 0;
  int min_tasks = 10;
  int max_tasks = 20;
  std::uint64_t seed = 0;
  /// Home worlds always use kHomeCapacity; restaurant worlds have none.
  std::optional<int> capacity_limit;
  double dirty_probability = 0.8;
  double filled_probability = 0.2;
  SearchBudget probe_budget{20000, std::chrono::milliseconds(2000)};

  /// Throws infeasible-config for inconsistent settings.
  void validate() const;
};

/// A goal template: typed parameters and goal predicates over parameter
/// variables or literal entity names ("water", "robot").
struct TaskTemplate {
  struct Param {
    std::string var;
    EntityKind kind = EntityKind::Object;
    std::vector<std::string> names;  ///< allowed categories; empty means any
    std::vector<Attribute> attributes;
    std::vector<Attribute> exclude_attributes;
  };
  std::string name;
  std::vector<Profile> profiles;
  std::vector<Param> params;
  std::vector<std::vector<std::string>> goal;
};

/// Built-in template table (data/task_templates.json).
const std::vector<TaskTemplate>& task_templates();
std::vector<TaskTemplate> parse_task_templates(const std::string& json_text);

/// Every binding of `tmpl` against the world's entities, in entity order.
std::vector<TaskSpec> instantiate(const TaskTemplate& tmpl, const World& world);

/// Procedural world: rooms separated by walls with doorways, containers on
/// room perimeters, objects with random dirt and contents, robot at a
/// container. Deterministic per config. Throws infeasible-config.
WorldState generate_world(const GeneratorConfig& cfg);

/// Template instantiations drawn round-robin across templates, keeping those
/// that are solvable and not already satisfied in `state`; uniform weights.
/// Throws no-feasible-tasks.
TaskDistribution generate_distribution(const WorldState& state, const GeneratorConfig& cfg,
                                       std::uint64_t seed);

}  // namespace antplan
