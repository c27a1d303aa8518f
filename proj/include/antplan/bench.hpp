#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "antplan/anticipation.hpp"
#include "antplan/envgen.hpp"
#include "antplan/preparation.hpp"
#include "antplan/stats.hpp"

namespace antplan {

enum class Regime : std::uint8_t { Myopic, Anticipatory, PrepMyopic, PrepAnticipatory };
inline constexpr Regime kAllRegimes[] = {Regime::Myopic, Regime::Anticipatory, Regime::PrepMyopic,
                                         Regime::PrepAnticipatory};

const char* to_string(Regime regime);
std::optional<Regime> parse_regime(const std::string& text);
inline bool prepares(Regime r) { return r == Regime::PrepMyopic || r == Regime::PrepAnticipatory; }
inline bool anticipates(Regime r) { return r == Regime::Anticipatory || r == Regime::PrepAnticipatory; }

enum class EstimatorKind : std::uint8_t { Oracle, Learned };

struct TrialConfig {
  std::string environment;  ///< label used in output file names
  Regime regime = Regime::Myopic;
  int sequence_length = 10;
  std::uint64_t sequence_seed = 0;  ///< task draws; shared across regimes for paired comparisons
  std::uint64_t planning_seed = 0;  ///< augmentation sampling and annealing
  AnticipationOptions anticipation;
  AnnealSchedule anneal;
  int chains = 1;
  SearchBudget budget;
  bool fold_preparation = false;
};

struct TaskRow {
  int index = 0;
  std::string label;
  double immediate = 0.0;
  double anticipatory = 0.0;  ///< estimate at the terminal state of the executed plan
  std::size_t expansions = 0;
  std::size_t actions = 0;
  double wall_ms = 0.0;
};

struct TrialResult {
  std::string environment;
  Regime regime = Regime::Myopic;
  std::vector<TaskRow> rows;
  double total = 0.0;  ///< Σ immediate (plus preparation cost when folded)
  std::optional<double> preparation_cost;
  double estimate_before = 0.0;  ///< estimator at the initial state
  double estimate_after = 0.0;   ///< estimator after preparation (equals before otherwise)
  bool aborted = false;
  std::string diagnostic;

  double mean_cost() const { return rows.empty() ? 0.0 : total / static_cast<double>(rows.size()); }
};

/// Outcome of the preparation step, shared by the regimes that prepare.
struct Preparation {
  WorldState state;
  double estimate_before = 0.0;
  double estimate_after = 0.0;
  std::optional<double> cost;
  std::string diagnostic;
};

/// Anneals from `s0` with `cfg.anneal` (seeded from `cfg.planning_seed`) and
/// prices the result. Throws when the estimator fails on `s0`.
Preparation run_preparation(const TrialConfig& cfg, const WorldState& s0, const CostEstimator& estimator);

/// i.i.d. draws from the distribution weights.
std::vector<std::size_t> draw_sequence(const TaskDistribution& dist, int length, std::uint64_t seed);

/// Runs one regime from `s0`: optional preparation, then each drawn task is
/// planned (myopic or anticipatory), executed, and its terminal state carried
/// into the next task. An unsolvable task aborts the trial with a diagnostic.
/// `prepared` supplies a precomputed preparation for the prep regimes.
TrialResult run_sequence(const TrialConfig& cfg, const WorldState& s0, const TaskDistribution& dist,
                         const CostEstimator& estimator, const Preparation* prepared = nullptr);

struct Summary {
  struct RegimeStats {
    Regime regime;
    std::size_t trials = 0;
    double mean_cost = 0.0;  ///< mean cost per task over all trials
    double reduction = 0.0;  ///< (myopic − regime) / myopic
    double mean_preparation_cost = 0.0;
    std::vector<double> curve;  ///< mean cost at each sequence index
  };
  int sequence_length = 0;
  std::vector<RegimeStats> regimes;
  struct Comparison {
    Regime better, worse;
    RankTest test;
  };
  std::vector<Comparison> comparisons;

  const RegimeStats* find(Regime r) const;
};

/// Per-regime means, per-index curves, reductions against myopic and paired
/// one-sided rank tests over environments. Throws mixed-length-inputs.
Summary aggregate(const std::vector<TrialResult>& results);

/// Benchmark suite document (JSON):
///
///   { "format": "antplan-suite", "version": 1,
///     "environments": { "profile": "restaurant", "first_seed": 0, "count": 50,
///                       "width": 20, "height": 12, "containers": 0, "objects": 0,
///                       "min_tasks": 10, "max_tasks": 20 }
///       or { "world": "w.json", "distribution": "d.json" },
///     "regimes": ["myopic", "anticipatory", "prep+myopic", "prep+anticipatory"],
///     "sequence_length": 10, "seed": 0,
///     "estimator": { "kind": "oracle" } | { "kind": "learned", "model": "m.json" },
///     "anticipation": { "samples": 20, "radius": 3, "max_added": 1 },
///     "anneal": { "iterations": 2000, "decay": 0.999, "t0": null, "chains": 1 },
///     "budget": { "max_expansions": 200000, "max_time_ms": 10000 },
///     "fold_preparation": false }
///
/// Relative paths resolve against the suite file's directory.
struct Suite {
  std::optional<GeneratorConfig> generator;
  std::uint64_t first_seed = 0;
  int count = 1;
  std::optional<std::filesystem::path> world_file, distribution_file;
  std::vector<Regime> regimes{std::begin(kAllRegimes), std::end(kAllRegimes)};
  EstimatorKind estimator = EstimatorKind::Oracle;
  std::optional<std::filesystem::path> model_file;
  TrialConfig trial;
  std::uint64_t seed = 0;
};

Suite parse_suite(const std::string& text, const std::filesystem::path& base_dir = {});
Suite load_suite(const std::filesystem::path& path);

/// Runs every (environment, regime) trial. Trials of one environment share
/// the world, the drawn sequence and the estimator (and its memo).
/// `progress` receives one line per finished trial when set.
std::vector<TrialResult> run_suite(const Suite& suite,
                                   const std::function<void(const TrialResult&)>& progress = {});

/// CSV column schema version written in every header comment.
inline constexpr int kCsvSchemaVersion = 1;

/// rows: index,label,immediate,anticipatory,expansions,actions
std::string trial_csv(const TrialResult& r);
/// one row per trial: environment,regime,tasks,total,mean_cost,preparation_cost,estimate_before,estimate_after,aborted,diagnostic
std::string trials_csv(const std::vector<TrialResult>& results);
/// regime,trials,mean_cost,reduction,mean_preparation_cost
std::string summary_csv(const Summary& s);
/// index,<regime>...
std::string curve_csv(const Summary& s);
/// better,worse,n,w_plus,z,p_value
std::string tests_csv(const Summary& s);
/// environment,regime,index,wall_ms
std::string timing_csv(const std::vector<TrialResult>& results);

/// Writes trial CSVs, trials.csv, summary.csv, curve.csv and tests.csv
/// (and timing.csv when `timing` is set) into `dir`.
void write_results(const std::vector<TrialResult>& results, const std::filesystem::path& dir, bool timing);

/// Rebuilds results from a directory written by write_results (trials.csv plus
/// per-trial CSVs).
std::vector<TrialResult> read_results(const std::filesystem::path& dir);

/// Mean cost per task against sequence index, one polyline per regime.
std::string plot_svg(const Summary& s);

}  // namespace antplan
