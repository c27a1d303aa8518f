#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "antplan/envgen.hpp"
#include "antplan/scene_graph.hpp"

namespace antplan {

struct TrainingDatum {
  SceneGraph graph;
  double label = 0.0;
};

struct Dataset {
  FeatureSpec spec;
  std::vector<TrainingDatum> data;
  /// One line per skipped state, e.g. an unsolvable distribution entry.
  std::vector<std::string> skipped;
};

struct DatasetConfig {
  GeneratorConfig generator;  ///< seed is overridden per environment
  int states = 500;
  int states_per_world = 20;
  /// Random perturbation chain length before each labeled state is drawn.
  int max_chain = 12;
  SearchBudget budget;
  std::uint64_t seed = 0;
};

/// Labels perturbed states of generated environments with the exact
/// anticipatory cost under each environment's generated distribution.
Dataset generate_dataset(const DatasetConfig& cfg);

/// JSON document: header (format, version, profile, names, feature length)
/// then per-datum node feature rows, edge pairs and label.
std::string dump_dataset(const Dataset& ds);
Dataset parse_dataset(const std::string& text);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace antplan
