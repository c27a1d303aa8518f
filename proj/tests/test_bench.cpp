#include <gtest/gtest.h>

#include <filesystem>

#include "antplan/bench.hpp"
#include "antplan/error.hpp"
#include "antplan/world_io.hpp"
#include "tiny.hpp"

using namespace antplan;
using namespace antplan::testkit;

namespace {

TrialResult fake_trial(const std::string& env, Regime regime, std::vector<double> costs) {
  TrialResult r;
  r.environment = env;
  r.regime = regime;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    TaskRow row;
    row.index = static_cast<int>(i);
    row.label = "t" + std::to_string(i);
    row.immediate = costs[i];
    r.rows.push_back(row);
    r.total += costs[i];
  }
  return r;
}

TrialConfig small_trial(Regime regime) {
  TrialConfig cfg;
  cfg.environment = "tiny";
  cfg.regime = regime;
  cfg.sequence_length = 4;
  cfg.sequence_seed = 5;
  cfg.planning_seed = 6;
  cfg.anticipation.samples = 5;
  cfg.anneal.iterations = 100;
  return cfg;
}

}  // namespace

TEST(Bench, RegimeNames) {
  for (Regime r : kAllRegimes) EXPECT_EQ(parse_regime(to_string(r)), r);
  EXPECT_EQ(std::string(to_string(Regime::PrepAnticipatory)), "prep+anticipatory");
  EXPECT_FALSE(parse_regime("greedy").has_value());
}

TEST(Bench, DrawSequenceFollowsWeights) {
  const auto inst = make_tiny(1);
  TaskDistribution d{{{TaskSpec({}, "a"), 0.2}, {TaskSpec({}, "b"), 0.8}}};
  const auto seq = draw_sequence(d, 5000, 3);
  EXPECT_EQ(seq, draw_sequence(d, 5000, 3));
  const double share = static_cast<double>(std::count(seq.begin(), seq.end(), 1u)) / 5000.0;
  EXPECT_NEAR(share, 0.8, 0.03);
  EXPECT_TRUE(draw_sequence(d, 0, 3).empty());
  EXPECT_THROW(draw_sequence(d, -1, 3), Error);
}

TEST(Bench, EmptySequenceCostsNothing) {
  const auto inst = make_tiny(2);
  const OracleEstimator oracle(inst.dist);
  TrialConfig cfg = small_trial(Regime::Myopic);
  cfg.sequence_length = 0;
  const TrialResult r = run_sequence(cfg, inst.state, inst.dist, oracle);
  EXPECT_TRUE(r.rows.empty());
  EXPECT_EQ(r.total, 0.0);
  EXPECT_FALSE(r.aborted);
}

TEST(Bench, ReplayAccounting) {
  const auto inst = make_tiny(3);
  const OracleEstimator oracle(inst.dist);
  for (Regime regime : kAllRegimes) {
    const TrialResult r = run_sequence(small_trial(regime), inst.state, inst.dist, oracle);
    ASSERT_FALSE(r.aborted) << r.diagnostic;
    ASSERT_EQ(r.rows.size(), 4u);
    double sum = 0.0;
    for (const auto& row : r.rows) sum += row.immediate;
    EXPECT_DOUBLE_EQ(r.total, sum);
    EXPECT_EQ(r.preparation_cost.has_value(), prepares(regime));
    if (prepares(regime)) {
      EXPECT_LE(r.estimate_after, r.estimate_before);
    } else {
      EXPECT_EQ(r.estimate_after, r.estimate_before);
    }
  }
  // The myopic rows are the optimal costs of each drawn task from the carried state.
  const TrialConfig cfg = small_trial(Regime::Myopic);
  const TrialResult r = run_sequence(cfg, inst.state, inst.dist, oracle);
  WorldState state = inst.state;
  const auto seq = draw_sequence(inst.dist, cfg.sequence_length, cfg.sequence_seed);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Plan p = task_plan(state, inst.dist.entries[seq[i]].task);
    EXPECT_DOUBLE_EQ(r.rows[i].immediate, p.total_cost.units());
    state = p.terminal;
  }
}

TEST(Bench, FoldedPreparationIsCounted) {
  const auto inst = make_tiny(4);
  const OracleEstimator oracle(inst.dist);
  TrialConfig cfg = small_trial(Regime::PrepMyopic);
  const TrialResult plain = run_sequence(cfg, inst.state, inst.dist, oracle);
  cfg.fold_preparation = true;
  const TrialResult folded = run_sequence(cfg, inst.state, inst.dist, oracle);
  ASSERT_TRUE(plain.preparation_cost.has_value());
  EXPECT_DOUBLE_EQ(folded.total, plain.total + *plain.preparation_cost);
}

TEST(Bench, UnsolvableTaskAbortsWithDiagnostic) {
  const WorldState s = line_state();
  const World& w = s.world();
  TaskDistribution d{{{TaskSpec({pred(w, PredicateName::Dirty, "cup1")}, "soil"), 1.0}}};
  const ConstantEstimator zero;
  const TrialResult r = run_sequence(small_trial(Regime::Myopic), s, d, zero);
  EXPECT_TRUE(r.aborted);
  EXPECT_NE(r.diagnostic.find("task 0 (soil)"), std::string::npos);
}

TEST(Bench, AggregateByHand) {
  std::vector<TrialResult> results{
      fake_trial("e1", Regime::Myopic, {10, 20}), fake_trial("e2", Regime::Myopic, {30, 40}),
      fake_trial("e1", Regime::Anticipatory, {9, 18}), fake_trial("e2", Regime::Anticipatory, {30, 36})};
  const Summary s = aggregate(results);
  EXPECT_EQ(s.sequence_length, 2);
  const auto* my = s.find(Regime::Myopic);
  const auto* ap = s.find(Regime::Anticipatory);
  ASSERT_TRUE(my && ap);
  EXPECT_DOUBLE_EQ(my->mean_cost, 25.0);
  EXPECT_DOUBLE_EQ(ap->mean_cost, 23.25);
  EXPECT_DOUBLE_EQ(ap->reduction, (25.0 - 23.25) / 25.0);
  EXPECT_EQ(ap->curve, (std::vector<double>{19.5, 27.0}));
  ASSERT_FALSE(s.comparisons.empty());
  EXPECT_EQ(s.comparisons[0].better, Regime::Anticipatory);
  EXPECT_EQ(s.comparisons[0].test.n, 2u);
  EXPECT_DOUBLE_EQ(s.comparisons[0].test.w_plus, 0.0);
}

TEST(Bench, AggregateSkipsAbortedAndRejectsMixedLengths) {
  std::vector<TrialResult> results{fake_trial("e1", Regime::Myopic, {10, 20}),
                                   fake_trial("e2", Regime::Myopic, {1})};
  try {
    aggregate(results);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MixedLengthInputs);
  }
  results[1].aborted = true;
  EXPECT_DOUBLE_EQ(aggregate(results).find(Regime::Myopic)->mean_cost, 15.0);
}

TEST(Bench, CsvRoundTrip) {
  const auto inst = make_tiny(5);
  const OracleEstimator oracle(inst.dist);
  std::vector<TrialResult> results;
  for (Regime regime : kAllRegimes) results.push_back(run_sequence(small_trial(regime), inst.state, inst.dist, oracle));
  results[0].diagnostic = "note, with \"quotes\"";
  const auto dir = std::filesystem::temp_directory_path() / "antplan_bench_csv_test";
  std::filesystem::remove_all(dir);
  write_results(results, dir, true);
  EXPECT_TRUE(std::filesystem::exists(dir / "timing.csv"));
  const auto back = read_results(dir);
  ASSERT_EQ(back.size(), results.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].regime, results[i].regime);
    EXPECT_EQ(back[i].diagnostic, results[i].diagnostic);
    EXPECT_EQ(trial_csv(back[i]), trial_csv(results[i]));
  }
  EXPECT_EQ(summary_csv(aggregate(back)), summary_csv(aggregate(results)));
  EXPECT_EQ(trials_csv(back), trials_csv(results));
  EXPECT_EQ(trial_csv(results[0]).rfind("# antplan-csv v1\n", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(Bench, SuiteParsing) {
  const Suite s = parse_suite(R"({"format": "antplan-suite", "version": 1,
      "environments": {"profile": "restaurant", "first_seed": 3, "count": 2, "min_tasks": 2, "max_tasks": 4},
      "regimes": ["myopic", "prep+anticipatory"], "sequence_length": 3, "seed": 8,
      "estimator": {"kind": "oracle"}, "anticipation": {"samples": 4, "radius": 2, "max_added": 1},
      "anneal": {"iterations": 50, "decay": 0.99, "t0": null, "chains": 1},
      "budget": {"max_expansions": 5000, "max_time_ms": 2000}, "fold_preparation": true})");
  ASSERT_TRUE(s.generator.has_value());
  EXPECT_EQ(s.first_seed, 3u);
  EXPECT_EQ(s.count, 2);
  EXPECT_EQ(s.regimes, (std::vector<Regime>{Regime::Myopic, Regime::PrepAnticipatory}));
  EXPECT_EQ(s.trial.sequence_length, 3);
  EXPECT_EQ(s.trial.anticipation.samples, 4);
  EXPECT_EQ(s.trial.anneal.iterations, 50);
  EXPECT_EQ(s.trial.budget.max_expansions, 5000u);
  EXPECT_TRUE(s.trial.fold_preparation);
  EXPECT_THROW(parse_suite("{\"format\": \"antplan-suite\", \"version\": 2}"), Error);
  EXPECT_THROW(parse_suite(R"({"format": "antplan-suite", "version": 1, "regimes": ["fast"]})"), Error);
}

TEST(Bench, FileSuiteRunsAndIsDeterministic) {
  const auto inst = make_tiny(6);
  const auto dir = std::filesystem::temp_directory_path() / "antplan_bench_suite_test";
  std::filesystem::create_directories(dir);
  save_world(inst.state, dir / "w.json");
  save_distribution(inst.dist, inst.state.world(), dir / "d.json");
  write_file(dir / "suite.json", R"({"format": "antplan-suite", "version": 1,
      "environments": {"world": "w.json", "distribution": "d.json"}, "sequence_length": 3,
      "anneal": {"iterations": 60}})");
  const Suite suite = load_suite(dir / "suite.json");
  const auto a = run_suite(suite), b = run_suite(suite);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(trials_csv(a), trials_csv(b));
  EXPECT_EQ(a[2].preparation_cost, a[3].preparation_cost);
  EXPECT_EQ(plot_svg(aggregate(a)), plot_svg(aggregate(b)));
  EXPECT_NE(plot_svg(aggregate(a)).find("<svg"), std::string::npos);
  std::filesystem::remove_all(dir);
}
