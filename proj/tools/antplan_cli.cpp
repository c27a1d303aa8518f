#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "antplan/bench.hpp"
#include "antplan/dataset.hpp"
#include "antplan/envgen.hpp"
#include "antplan/error.hpp"
#include "antplan/estimator.hpp"
#include "antplan/rng.hpp"
#include "antplan/stats.hpp"
#include "antplan/world_io.hpp"

using namespace antplan;
using nlohmann::json;

namespace {

std::string fixed(double v, int decimals) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_file(path, text);
}

struct EstimatorChoice {
  std::string kind = "oracle";
  std::string model;

  void add(CLI::App* cmd) {
    cmd->add_option("--estimator", kind, "oracle or learned")->check(CLI::IsMember({"oracle", "learned"}));
    cmd->add_option("--model", model, "regressor parameters for --estimator learned");
  }

  std::unique_ptr<CostEstimator> make(const TaskDistribution& dist, const SearchBudget& budget) const {
    if (kind == "oracle") return std::make_unique<OracleEstimator>(dist, budget);
    if (model.empty()) throw Error(ErrorKind::InvalidArgument, "--estimator learned requires --model");
    return std::make_unique<LearnedEstimator>(load_model(model));
  }
};

struct BudgetFlags {
  std::size_t expansions = SearchBudget{}.max_expansions;
  long time_ms = SearchBudget{}.max_time.count();

  void add(CLI::App* cmd) {
    cmd->add_option("--max-expansions", expansions, "search node limit per planning call");
    cmd->add_option("--max-time-ms", time_ms, "wall-clock limit per planning call");
  }
  SearchBudget get() const {
    SearchBudget b{expansions, std::chrono::milliseconds(time_ms)};
    b.validate();
    return b;
  }
};

std::string plan_report(const WorldState& s0, const TaskSpec& task, const Candidate& c, const std::string& mode) {
  const World& w = s0.world();
  json doc;
  doc["task"] = task.label;
  doc["mode"] = mode;
  json actions = json::array();
  for (const GroundedAction& a : c.plan.actions) actions.push_back({{"action", describe(w, a)}, {"cost", a.cost.str()}});
  doc["actions"] = std::move(actions);
  doc["immediate"] = fixed(c.immediate, 3);
  doc["anticipatory"] = fixed(c.anticipatory, 6);
  doc["total"] = fixed(c.total, 6);
  doc["optimal"] = c.plan.optimal;
  if (c.augmentation) {
    json added = json::array();
    for (const Predicate& p : c.augmentation->added) added.push_back(describe(w, p));
    doc["added"] = std::move(added);
  }
  return doc.dump(2) + "\n";
}

const TaskSpec& pick_task(const TaskDistribution& dist, const std::string& label, int index) {
  if (!label.empty()) {
    for (const auto& e : dist.entries)
      if (e.task.label == label) return e.task;
    throw Error(ErrorKind::InvalidArgument, "no task labelled '" + label + "' in the distribution");
  }
  if (index < 0 || index >= static_cast<int>(dist.size()))
    throw Error(ErrorKind::InvalidArgument, "task index " + std::to_string(index) + " out of range");
  return dist.entries[index].task;
}

void print_summary(const Summary& s) {
  for (const auto& st : s.regimes)
    std::cout << to_string(st.regime) << ": mean " << fixed(st.mean_cost, 3) << " over " << st.trials
              << " trials, reduction " << fixed(100.0 * st.reduction, 2) << "%\n";
  for (const auto& c : s.comparisons)
    std::cout << to_string(c.better) << " < " << to_string(c.worse) << ": n=" << c.test.n
              << " p=" << fixed(c.test.p_value, 6) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anticipatory task planning toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a world and its task distribution");
  std::string gen_profile = "restaurant", gen_grid = "20x12", gen_world = "world.json", gen_dist = "distribution.json";
  GeneratorConfig gcfg;
  gen->add_option("--profile", gen_profile)->check(CLI::IsMember({"restaurant", "home"}));
  gen->add_option("--seed", gcfg.seed);
  gen->add_option("--grid", gen_grid, "WIDTHxHEIGHT");
  gen->add_option("--containers", gcfg.containers, "0 draws from 6-10");
  gen->add_option("--objects", gcfg.objects, "0 draws from 8-15");
  gen->add_option("--rooms", gcfg.rooms);
  gen->add_option("--min-tasks", gcfg.min_tasks);
  gen->add_option("--max-tasks", gcfg.max_tasks);
  gen->add_option("--out-world", gen_world);
  gen->add_option("--out-distribution", gen_dist);

  // plan
  auto* plan = app.add_subcommand("plan", "plan one task from a world");
  std::string plan_world, plan_dist, plan_task, plan_mode = "myopic", plan_out, plan_state_out;
  int plan_index = 0;
  AnticipationOptions aopt;
  EstimatorChoice plan_est;
  BudgetFlags plan_budget;
  plan->add_option("--world", plan_world)->required();
  plan->add_option("--distribution", plan_dist)->required();
  plan->add_option("--task", plan_task, "task label (defaults to --task-index)");
  plan->add_option("--task-index", plan_index);
  plan->add_option("--mode", plan_mode)->check(CLI::IsMember({"myopic", "anticipatory"}));
  plan->add_option("--samples", aopt.samples);
  plan->add_option("--seed", aopt.seed);
  plan->add_option("--radius", aopt.radius);
  plan->add_option("--max-added", aopt.max_added);
  plan->add_option("--out", plan_out, "plan report (JSON); stdout by default");
  plan->add_option("--out-world", plan_state_out, "terminal state of the plan");
  plan_est.add(plan);
  plan_budget.add(plan);

  // prepare
  auto* prep = app.add_subcommand("prepare", "optimize the world state ahead of future tasks");
  std::string prep_world, prep_dist, prep_out = "prepared.json", prep_report;
  AnnealSchedule sched;
  double prep_t0 = 0.0;
  int prep_chains = 1;
  EstimatorChoice prep_est;
  BudgetFlags prep_budget;
  prep->add_option("--world", prep_world)->required();
  prep->add_option("--distribution", prep_dist)->required();
  prep->add_option("--iterations", sched.iterations);
  prep->add_option("--t0", prep_t0, "initial temperature; default 10% of the initial estimate");
  prep->add_option("--decay", sched.decay);
  prep->add_option("--seed", sched.seed);
  prep->add_option("--chains", prep_chains);
  prep->add_option("--out", prep_out, "prepared world file");
  prep->add_option("--report", prep_report, "before/after CSV; stdout by default");
  prep_est.add(prep);
  prep_budget.add(prep);

  // datagen
  auto* datagen = app.add_subcommand("datagen", "label generated states with the exact anticipatory cost");
  DatasetConfig dcfg;
  std::string data_profile = "restaurant", data_out = "dataset.json";
  BudgetFlags data_budget;
  datagen->add_option("--profile", data_profile)->check(CLI::IsMember({"restaurant", "home"}));
  datagen->add_option("--states", dcfg.states);
  datagen->add_option("--states-per-world", dcfg.states_per_world);
  datagen->add_option("--max-chain", dcfg.max_chain);
  datagen->add_option("--seed", dcfg.seed);
  datagen->add_option("--out", data_out);
  data_budget.add(datagen);

  // train
  auto* trainc = app.add_subcommand("train", "fit the graph regressor");
  TrainingConfig tcfg;
  std::string train_data, train_out = "model.json", train_trace;
  trainc->add_option("--data", train_data)->required();
  trainc->add_option("--out", train_out);
  trainc->add_option("--loss-trace", train_trace, "per-step loss CSV");
  trainc->add_option("--epochs", tcfg.epochs);
  trainc->add_option("--batch-size", tcfg.batch_size);
  trainc->add_option("--learning-rate", tcfg.learning_rate);
  trainc->add_option("--step-size", tcfg.step_size);
  trainc->add_option("--gamma", tcfg.step_gamma);
  trainc->add_option("--layers", tcfg.layers);
  trainc->add_option("--hidden", tcfg.hidden);
  trainc->add_option("--seed", tcfg.seed);

  // eval-estimator
  auto* evalc = app.add_subcommand("eval-estimator", "MAE and rank correlation on a dataset");
  std::string eval_model, eval_data, eval_out;
  evalc->add_option("--model", eval_model)->required();
  evalc->add_option("--data", eval_data)->required();
  evalc->add_option("--out", eval_out, "report CSV; stdout by default");

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark suites");
  bench->require_subcommand(1);
  auto* brun = bench->add_subcommand("run", "run a suite and write CSVs");
  std::string suite_file, run_out = "results";
  bool timing = false, quiet = false;
  brun->add_option("--suite", suite_file)->required();
  brun->add_option("--out", run_out);
  brun->add_flag("--timing", timing, "also write timing.csv (wall-clock, not reproducible)");
  brun->add_flag("--quiet", quiet);
  auto* breport = bench->add_subcommand("report", "recompute summaries from a results directory");
  std::string report_in;
  breport->add_option("--in", report_in)->required();
  auto* bplot = bench->add_subcommand("plot", "render per-index cost curves as SVG");
  std::string plot_in, plot_out;
  bplot->add_option("--in", plot_in)->required();
  bplot->add_option("--out", plot_out, "SVG path; <in>/curve.svg by default");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      gcfg.profile = *parse_profile(gen_profile);
      if (std::sscanf(gen_grid.c_str(), "%dx%d", &gcfg.width, &gcfg.height) != 2)
        throw Error(ErrorKind::InvalidArgument, "--grid expects WIDTHxHEIGHT");
      gcfg.validate();
      const WorldState s0 = generate_world(gcfg);
      const TaskDistribution dist = generate_distribution(s0, gcfg, Rng::mix(gcfg.seed, 1));
      save_world(s0, gen_world);
      save_distribution(dist, s0.world(), gen_dist);
      std::cerr << "wrote " << gen_world << " and " << gen_dist << " (" << dist.size() << " tasks)\n";
    } else if (*plan) {
      const WorldState s0 = load_world(plan_world);
      const TaskDistribution dist = load_distribution(plan_dist, s0.world());
      const TaskSpec& task = pick_task(dist, plan_task, plan_index);
      aopt.budget = plan_budget.get();
      const auto est = plan_est.make(dist, aopt.budget);
      const Candidate c = plan_mode == "myopic" ? myopic_candidate(s0, task, *est, aopt.budget)
                                                : anticipatory_plan(s0, task, *est, aopt);
      emit(plan_out, plan_report(s0, task, c, plan_mode));
      if (!plan_state_out.empty()) save_world(c.plan.terminal, plan_state_out);
    } else if (*prep) {
      const WorldState s0 = load_world(prep_world);
      const TaskDistribution dist = load_distribution(prep_dist, s0.world());
      if (prep_t0 > 0.0) sched.t0 = prep_t0;
      sched.validate();
      const SearchBudget budget = prep_budget.get();
      const auto est = prep_est.make(dist, budget);
      const WorldState sp = prepare(s0, *est, sched, prep_chains);
      save_world(sp, prep_out);
      std::string report = "# antplan-csv v" + std::to_string(kCsvSchemaVersion) +
                           "\nestimate_before,estimate_after,preparation_cost,changed_objects\n";
      std::string cost;
      try {
        cost = fixed(preparation_cost(s0, sp, budget).units(), 3);
      } catch (const Error& e) {
        std::cerr << "preparation cost unavailable: " << e.what() << "\n";
      }
      report += fixed(est->estimate(s0), 6) + "," + fixed(est->estimate(sp), 6) + "," + cost + "," +
                std::to_string(difference_task(s0, sp).goal.size()) + "\n";
      emit(prep_report, report);
    } else if (*datagen) {
      dcfg.generator.profile = *parse_profile(data_profile);
      dcfg.budget = data_budget.get();
      const Dataset ds = generate_dataset(dcfg);
      for (const auto& line : ds.skipped) std::cerr << "skipped: " << line << "\n";
      save_dataset(ds, data_out);
      std::cerr << "wrote " << ds.data.size() << " labelled states to " << data_out << "\n";
    } else if (*trainc) {
      const Dataset ds = load_dataset(train_data);
      const TrainingResult r = train(ds, tcfg);
      save_model(r.model, train_out);
      if (!train_trace.empty()) {
        std::string csv = "# antplan-csv v" + std::to_string(kCsvSchemaVersion) + "\nstep,epoch,loss\n";
        const std::size_t per_epoch = r.step_loss.size() / r.epoch_loss.size();
        for (std::size_t i = 0; i < r.step_loss.size(); ++i)
          csv += std::to_string(i + 1) + "," + std::to_string(i / per_epoch + 1) + "," + fixed(r.step_loss[i], 9) + "\n";
        write_file(train_trace, csv);
      }
      std::cerr << "final epoch MAE " << fixed(r.epoch_loss.back(), 6) << "\n";
    } else if (*evalc) {
      const RegressorModel model = load_model(eval_model);
      const Dataset ds = load_dataset(eval_data);
      if (ds.spec.names != model.spec.names)
        throw Error(ErrorKind::ShapeMismatch, "dataset and model use different vocabularies");
      const auto pred = predict_all(model, ds);
      std::vector<double> labels, err;
      for (std::size_t i = 0; i < ds.data.size(); ++i) {
        labels.push_back(ds.data[i].label);
        err.push_back(std::abs(pred[i] - ds.data[i].label));
      }
      emit(eval_out, "# antplan-csv v" + std::to_string(kCsvSchemaVersion) + "\nn,mae,spearman\n" +
                         std::to_string(ds.data.size()) + "," + fixed(mean(err), 6) + "," +
                         fixed(spearman(pred, labels), 6) + "\n");
    } else if (*brun) {
      const Suite suite = load_suite(suite_file);
      const auto results = run_suite(suite, [&](const TrialResult& r) {
        if (quiet) return;
        std::cerr << r.environment << " " << to_string(r.regime) << ": " << r.rows.size() << " tasks, mean "
                  << fixed(r.mean_cost(), 3) << (r.aborted ? " ABORTED " + r.diagnostic : std::string()) << "\n";
      });
      write_results(results, run_out, timing);
      print_summary(aggregate(results));
      for (const TrialResult& r : results)
        if (r.aborted) return 2;
    } else if (*breport) {
      const auto results = read_results(report_in);
      const Summary s = aggregate(results);
      write_file(std::filesystem::path(report_in) / "summary.csv", summary_csv(s));
      write_file(std::filesystem::path(report_in) / "curve.csv", curve_csv(s));
      write_file(std::filesystem::path(report_in) / "tests.csv", tests_csv(s));
      print_summary(s);
      for (const TrialResult& r : results)
        if (r.aborted) return 2;
    } else if (*bplot) {
      const Summary s = aggregate(read_results(plot_in));
      write_file(plot_out.empty() ? std::filesystem::path(plot_in) / "curve.svg" : std::filesystem::path(plot_out),
                 plot_svg(s));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
