#pragma once

#include <filesystem>
#include <string>

#include "antplan/distribution.hpp"
#include "antplan/world.hpp"

namespace antplan {

/// World description document (JSON):
///
///   { "format": "antplan-world", "version": 1,
///     "profile": "restaurant" | "home",
///     "capacity_limit": null | int,
///     "disposal": "<container id>"            (optional, defaults to the first sink)
///     "costs": { "pick": 2, ... }             (optional)
///     "grid": { "cell_size": 1.0, "rows": ["....", ".#.."] },
///     "entities": [ { "id", "name", "kind", "cell": [x, y], "room", "attributes": [...] } ],
///     "facts": [ ["in", "cup1", "sink"], ["dirty", "cup1"], ... ] }
///
/// The robot entity's cell is the robot cell of the state. Errors are
/// reported as invalid-world with "<source>:<line>:" prefixes.
WorldState parse_world(const std::string& text, const std::string& source = "<world>");
WorldState load_world(const std::filesystem::path& path);
std::string dump_world(const WorldState& state);
void save_world(const WorldState& state, const std::filesystem::path& path);

/// Task distribution document (JSON):
///
///   { "format": "antplan-distribution", "version": 1,
///     "tasks": [ { "label": "...", "goal": [["in", "cup1", "table1"]], "weight": 0.5 } ] }
TaskDistribution parse_distribution(const std::string& text, const World& world,
                                    const std::string& source = "<distribution>");
TaskDistribution load_distribution(const std::filesystem::path& path, const World& world);
std::string dump_distribution(const TaskDistribution& dist, const World& world);
void save_distribution(const TaskDistribution& dist, const World& world,
                       const std::filesystem::path& path);

/// "in(cup1, table1)" style parsing against a world. Throws unknown-entity / invalid-argument.
Predicate parse_predicate(const std::vector<std::string>& tokens, const World& world);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace antplan
