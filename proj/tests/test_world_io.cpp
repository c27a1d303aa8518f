#include <gtest/gtest.h>

#include <filesystem>

#include "antplan/error.hpp"
#include "antplan/world_io.hpp"
#include "tiny.hpp"

using namespace antplan;
using namespace antplan::testkit;

TEST(WorldIo, RoundTripPreservesState) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = make_tiny(seed);
    const std::string text = dump_world(inst.state);
    const WorldState back = parse_world(text);
    EXPECT_EQ(back.robot_cell(), inst.state.robot_cell());
    EXPECT_EQ(back.objects(), inst.state.objects());
    EXPECT_EQ(back.world().grid(), inst.state.world().grid());
    EXPECT_EQ(back.facts(), inst.state.facts());
    EXPECT_EQ(dump_world(back), text);
  }
}

TEST(WorldIo, DistributionRoundTrip) {
  const auto inst = make_tiny(4);
  const World& w = inst.state.world();
  const std::string text = dump_distribution(inst.dist, w);
  const TaskDistribution back = parse_distribution(text, w);
  ASSERT_EQ(back.size(), inst.dist.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back.entries[i].task, inst.dist.entries[i].task);
    EXPECT_DOUBLE_EQ(back.entries[i].weight, inst.dist.entries[i].weight);
  }
  EXPECT_EQ(dump_distribution(back, w), text);
}

TEST(WorldIo, FilesRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "antplan_world_io_test";
  std::filesystem::create_directories(dir);
  const WorldState s = line_state();
  save_world(s, dir / "w.json");
  EXPECT_EQ(load_world(dir / "w.json").objects(), s.objects());
  std::filesystem::remove_all(dir);
  EXPECT_THROW(load_world(dir / "missing.json"), Error);
}

TEST(WorldIo, ErrorsCarrySourcePrefix) {
  try {
    parse_world("{\"format\": \"antplan-world\",\n \"version\": 1,\n \"profile\": \"nowhere\"}", "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidWorld);
    EXPECT_NE(std::string(e.what()).find("bad.json:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_world("not json", "x"), Error);
}

TEST(WorldIo, DistributionValidation) {
  const auto w = line_world();
  const std::string unknown =
      R"({"format": "antplan-distribution", "version": 1, "tasks": [{"label": "a", "goal": [["in", "cup9", "table"]], "weight": 1.0}]})";
  EXPECT_THROW(parse_distribution(unknown, *w), Error);
  const std::string weights =
      R"({"format": "antplan-distribution", "version": 1, "tasks": [{"label": "a", "goal": [["clean", "cup1"]], "weight": 0.4}]})";
  try {
    parse_distribution(weights, *w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidDistribution);
  }
}

TEST(WorldIo, ParsePredicate) {
  const auto w = line_world();
  EXPECT_EQ(parse_predicate({"filled-with", "cup1", "water"}, *w), pred(*w, PredicateName::FilledWith, "cup1", "water"));
  EXPECT_THROW(parse_predicate({"in", "cup1"}, *w), Error);
  EXPECT_THROW(parse_predicate({"floating", "cup1"}, *w), Error);
}
