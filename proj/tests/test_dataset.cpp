#include <gtest/gtest.h>

#include "antplan/anticipation.hpp"
#include "antplan/dataset.hpp"
#include "antplan/error.hpp"
#include "antplan/rng.hpp"

using namespace antplan;

namespace {

DatasetConfig small_config() {
  DatasetConfig cfg;
  cfg.generator.width = 14;
  cfg.generator.height = 8;
  cfg.generator.containers = 6;
  cfg.generator.objects = 6;
  cfg.generator.min_tasks = 3;
  cfg.generator.max_tasks = 5;
  cfg.states = 12;
  cfg.states_per_world = 4;
  cfg.seed = 9;
  return cfg;
}

}  // namespace

TEST(Dataset, GenerationIsDeterministicAndSized) {
  const DatasetConfig cfg = small_config();
  const Dataset a = generate_dataset(cfg), b = generate_dataset(cfg);
  ASSERT_EQ(a.data.size(), 12u);
  EXPECT_EQ(dump_dataset(a), dump_dataset(b));
  for (const auto& d : a.data) {
    EXPECT_EQ(d.graph.features.cols(), a.spec.length());
    EXPECT_GE(d.label, 0.0);
  }
}

TEST(Dataset, FirstStateOfEachWorldIsLabeledWithTheExactCost) {
  DatasetConfig cfg = small_config();
  cfg.states = 1;
  const Dataset ds = generate_dataset(cfg);
  GeneratorConfig gen = cfg.generator;
  gen.seed = Rng::mix(cfg.seed, 0);
  const WorldState s0 = generate_world(gen);
  const TaskDistribution dist = generate_distribution(s0, gen, Rng::mix(gen.seed, 1));
  ASSERT_EQ(ds.data.size(), 1u);
  EXPECT_DOUBLE_EQ(ds.data[0].label, anticipatory_cost_exact(s0, dist));
  EXPECT_EQ(ds.data[0].graph.features, convert_to_graph(s0, ds.spec).features);
}

TEST(Dataset, JsonRoundTrip) {
  const Dataset a = generate_dataset(small_config());
  const Dataset b = parse_dataset(dump_dataset(a));
  ASSERT_EQ(a.data.size(), b.data.size());
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    EXPECT_EQ(a.data[i].graph.features, b.data[i].graph.features);
    EXPECT_EQ(a.data[i].graph.edges, b.data[i].graph.edges);
    EXPECT_EQ(a.data[i].label, b.data[i].label);
  }
  EXPECT_EQ(b.spec.names, a.spec.names);
  EXPECT_THROW(parse_dataset("{\"format\": \"other\"}"), Error);
}

TEST(Dataset, RejectsBadConfig) {
  DatasetConfig cfg = small_config();
  cfg.states = 0;
  EXPECT_THROW(generate_dataset(cfg), Error);
}
