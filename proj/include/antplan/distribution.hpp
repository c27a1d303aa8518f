#pragma once

#include <vector>

#include "antplan/world.hpp"

namespace antplan {

/// P(task): weighted tasks for one environment.
struct TaskDistribution {
  struct Entry {
    TaskSpec task;
    double weight = 0.0;
  };
  std::vector<Entry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  /// Weights positive and summing to one within 1e-9; goals reference
  /// entities of `world`. Throws invalid-distribution / unknown-entity.
  void validate(const World& world) const;

  /// Equal weights over `tasks`.
  static TaskDistribution uniform(std::vector<TaskSpec> tasks);
};

}  // namespace antplan
