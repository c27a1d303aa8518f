#include <gtest/gtest.h>

#include <cmath>

#include "antplan/envgen.hpp"
#include "antplan/error.hpp"
#include "tiny.hpp"

using namespace antplan;
using namespace antplan::testkit;

TEST(EnvGen, DeterministicPerSeed) {
  GeneratorConfig cfg;
  cfg.seed = 17;
  const WorldState a = generate_world(cfg), b = generate_world(cfg);
  EXPECT_EQ(a.objects(), b.objects());
  EXPECT_EQ(a.robot_cell(), b.robot_cell());
  EXPECT_EQ(a.world().grid(), b.world().grid());
  const auto da = generate_distribution(a, cfg, 5), db = generate_distribution(b, cfg, 5);
  ASSERT_EQ(da.size(), db.size());
  for (std::size_t i = 0; i < da.size(); ++i) EXPECT_EQ(da.entries[i].task, db.entries[i].task);
}

TEST(EnvGen, WorldsAreConnectedAndValid) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.profile = seed % 4 == 0 ? Profile::Home : Profile::Restaurant;
    const WorldState s = generate_world(cfg);
    EXPECT_NO_THROW(s.validate());
    EXPECT_TRUE(connected(s.world().grid())) << "seed " << seed;
    EXPECT_GE(s.world().container_at(s.robot_cell()), 0);
    if (cfg.profile == Profile::Home) {
      EXPECT_EQ(s.world().capacity_limit(), kHomeCapacity);
    }
    const int n = static_cast<int>(s.world().containers().size());
    for (int c = 0; c < n; ++c) EXPECT_TRUE(std::isfinite(s.world().distance(c, s.robot_cell())));
  }
}

TEST(EnvGen, DistributionsAreSolvableAndNormalized) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    const WorldState s = generate_world(cfg);
    const TaskDistribution d = generate_distribution(s, cfg, seed);
    EXPECT_NO_THROW(d.validate(s.world()));
    EXPECT_GE(static_cast<int>(d.size()), 1);
    EXPECT_LE(static_cast<int>(d.size()), cfg.max_tasks);
    double sum = 0.0;
    for (const auto& e : d.entries) {
      sum += e.weight;
      EXPECT_FALSE(satisfies(s, e.task));
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(EnvGen, ConfigValidation) {
  GeneratorConfig cfg;
  cfg.width = 2;
  EXPECT_THROW(generate_world(cfg), Error);
  cfg = {};
  cfg.min_tasks = 5;
  cfg.max_tasks = 2;
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InfeasibleConfig);
  }
}

TEST(EnvGen, TemplateTableIsComplete) {
  const auto& table = task_templates();
  std::vector<std::string> names;
  for (const auto& t : table) names.push_back(t.name);
  for (const char* n : {"ServeWater", "MakeCoffee", "ServeFruitBowl", "ClearContainers", "WashObjects", "PickAndPlace"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  EXPECT_THROW(parse_task_templates("[]"), Error);
}

TEST(EnvGen, NoFruitMeansNoFruitBowlTasks) {
  const auto w = line_world();  // one apple, one bowl, one table
  const TaskTemplate* fruit = nullptr;
  for (const auto& t : task_templates())
    if (t.name == "ServeFruitBowl") fruit = &t;
  ASSERT_NE(fruit, nullptr);
  EXPECT_EQ(instantiate(*fruit, *w).size(), 1u);

  const auto grid = OccupancyGrid::from_rows({"....", "...."});
  std::vector<Entity> e{Entity{"robot", "robot", EntityKind::Robot, Cell{0, 0}, {}, {}},
                        container_entity("sink", "sink", {0, 0}), container_entity("table", "table", {2, 0}),
                        object_entity("bowl1", "bowl"), object_entity("cup1", "cup")};
  const World no_fruit(grid, e, Profile::Restaurant);
  EXPECT_TRUE(instantiate(*fruit, no_fruit).empty());
}

TEST(EnvGen, InstantiationBindsByNameAndAttribute) {
  const auto w = line_world();
  for (const auto& t : task_templates()) {
    if (t.name != "MakeCoffee") continue;
    const auto tasks = instantiate(t, *w);
    ASSERT_EQ(tasks.size(), 1u);
    EXPECT_TRUE(std::binary_search(tasks[0].goal.begin(), tasks[0].goal.end(),
                                   pred(*w, PredicateName::FilledWith, "cup1", "coffee")));
  }
}
