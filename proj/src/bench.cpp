#include "antplan/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "antplan/error.hpp"
#include "antplan/estimator.hpp"
#include "antplan/rng.hpp"
#include "antplan/world_io.hpp"

namespace antplan {

using nlohmann::json;

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Myopic: return "myopic";
    case Regime::Anticipatory: return "anticipatory";
    case Regime::PrepMyopic: return "prep+myopic";
    case Regime::PrepAnticipatory: return "prep+anticipatory";
  }
  return "?";
}

std::optional<Regime> parse_regime(const std::string& text) {
  for (Regime r : kAllRegimes)
    if (text == to_string(r)) return r;
  return std::nullopt;
}

std::vector<std::size_t> draw_sequence(const TaskDistribution& dist, int length, std::uint64_t seed) {
  if (length < 0) throw Error(ErrorKind::InvalidArgument, "sequence length must be nonnegative");
  if (dist.empty() && length > 0) throw Error(ErrorKind::InvalidDistribution, "empty distribution");
  Rng rng(seed);
  std::vector<std::size_t> out;
  for (int i = 0; i < length; ++i) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = dist.size() - 1;
    for (std::size_t k = 0; k < dist.size(); ++k) {
      acc += dist.entries[k].weight;
      if (u < acc) {
        pick = k;
        break;
      }
    }
    out.push_back(pick);
  }
  return out;
}

Preparation run_preparation(const TrialConfig& cfg, const WorldState& s0, const CostEstimator& estimator) {
  AnnealSchedule schedule = cfg.anneal;
  schedule.seed = Rng::mix(cfg.planning_seed, 0xA11EA1);
  Preparation p{prepare(s0, estimator, schedule, cfg.chains), estimator.estimate(s0), 0.0, std::nullopt, {}};
  p.estimate_after = estimator.estimate(p.state);
  try {
    p.cost = preparation_cost(s0, p.state, cfg.budget).units();
  } catch (const Error& e) {
    p.diagnostic = std::string("preparation cost unavailable: ") + e.what();
  }
  return p;
}

TrialResult run_sequence(const TrialConfig& cfg, const WorldState& s0, const TaskDistribution& dist,
                         const CostEstimator& estimator, const Preparation* prepared) {
  TrialResult r;
  r.environment = cfg.environment;
  r.regime = cfg.regime;
  WorldState state = s0;
  try {
    r.estimate_before = estimator.estimate(s0);
    r.estimate_after = r.estimate_before;
    if (prepares(cfg.regime)) {
      const Preparation p = prepared ? *prepared : run_preparation(cfg, s0, estimator);
      state = p.state;
      r.estimate_after = p.estimate_after;
      r.preparation_cost = p.cost;
      r.diagnostic = p.diagnostic;
    }
  } catch (const Error& e) {
    r.aborted = true;
    r.diagnostic = std::string("before the first task: ") + e.what();
    return r;
  }

  const auto sequence = draw_sequence(dist, cfg.sequence_length, cfg.sequence_seed);
  for (int i = 0; i < static_cast<int>(sequence.size()); ++i) {
    const TaskSpec& task = dist.entries[sequence[i]].task;
    const auto start = std::chrono::steady_clock::now();
    try {
      Candidate c = [&] {
        if (!anticipates(cfg.regime)) return myopic_candidate(state, task, estimator, cfg.budget);
        AnticipationOptions options = cfg.anticipation;
        options.budget = cfg.budget;
        options.seed = Rng::mix(cfg.planning_seed, static_cast<std::uint64_t>(i));
        return anticipatory_plan(state, task, estimator, options);
      }();
      TaskRow row;
      row.index = i;
      row.label = task.label;
      row.immediate = c.immediate;
      row.anticipatory = c.anticipatory;
      row.expansions = c.plan.expansions;
      row.actions = c.plan.actions.size();
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      r.rows.push_back(std::move(row));
      state = c.plan.terminal;
    } catch (const Error& e) {
      r.aborted = true;
      r.diagnostic = "task " + std::to_string(i) + " (" + task.label + "): " + e.what();
      break;
    }
  }
  for (const TaskRow& row : r.rows) r.total += row.immediate;
  if (cfg.fold_preparation && r.preparation_cost) r.total += *r.preparation_cost;
  return r;
}

// ---------------------------------------------------------------------------
// Aggregation

const Summary::RegimeStats* Summary::find(Regime r) const {
  for (const auto& s : regimes)
    if (s.regime == r) return &s;
  return nullptr;
}

Summary aggregate(const std::vector<TrialResult>& results) {
  Summary s;
  s.sequence_length = -1;
  std::map<Regime, std::vector<const TrialResult*>> by_regime;
  for (const TrialResult& r : results) {
    if (r.aborted) continue;
    const int len = static_cast<int>(r.rows.size());
    if (s.sequence_length >= 0 && len != s.sequence_length)
      throw Error(ErrorKind::MixedLengthInputs, "trial '" + r.environment + "' has " + std::to_string(len) +
                                                    " tasks, expected " + std::to_string(s.sequence_length));
    s.sequence_length = len;
    by_regime[r.regime].push_back(&r);
  }
  if (s.sequence_length < 0) s.sequence_length = 0;

  for (Regime regime : kAllRegimes) {
    const auto it = by_regime.find(regime);
    if (it == by_regime.end()) continue;
    Summary::RegimeStats st;
    st.regime = regime;
    st.trials = it->second.size();
    st.curve.assign(s.sequence_length, 0.0);
    double prep = 0.0;
    std::size_t prep_count = 0;
    for (const TrialResult* r : it->second) {
      st.mean_cost += r->mean_cost();
      for (int i = 0; i < s.sequence_length; ++i) st.curve[i] += r->rows[i].immediate;
      if (r->preparation_cost) {
        prep += *r->preparation_cost;
        ++prep_count;
      }
    }
    st.mean_cost /= static_cast<double>(st.trials);
    for (double& v : st.curve) v /= static_cast<double>(st.trials);
    st.mean_preparation_cost = prep_count ? prep / static_cast<double>(prep_count) : 0.0;
    s.regimes.push_back(std::move(st));
  }
  if (const auto* myopic = s.find(Regime::Myopic); myopic && myopic->mean_cost != 0.0)
    for (auto& st : s.regimes) st.reduction = (myopic->mean_cost - st.mean_cost) / myopic->mean_cost;

  auto paired = [&](Regime better, Regime worse) {
    if (!by_regime.count(better) || !by_regime.count(worse)) return;
    std::map<std::string, double> worse_cost;
    for (const TrialResult* r : by_regime[worse]) worse_cost[r->environment] = r->mean_cost();
    std::vector<double> a, b;
    for (const TrialResult* r : by_regime[better]) {
      const auto w = worse_cost.find(r->environment);
      if (w == worse_cost.end()) continue;
      a.push_back(r->mean_cost());
      b.push_back(w->second);
    }
    s.comparisons.push_back({better, worse, wilcoxon_less(a, b)});
  };
  paired(Regime::Anticipatory, Regime::Myopic);
  paired(Regime::PrepMyopic, Regime::Myopic);
  paired(Regime::PrepAnticipatory, Regime::PrepMyopic);
  paired(Regime::PrepAnticipatory, Regime::Anticipatory);
  return s;
}

// ---------------------------------------------------------------------------
// Suites

namespace {

Suite suite_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object() || doc.value("format", "") != "antplan-suite" || doc.value("version", 0) != 1)
    throw Error(ErrorKind::Io, "not an antplan-suite version 1 document");
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  Suite s;
  const json& env = doc.at("environments");
  if (env.contains("world")) {
    s.world_file = resolve(env.at("world").get<std::string>());
    s.distribution_file = resolve(env.at("distribution").get<std::string>());
  } else {
    GeneratorConfig g;
    const auto profile = parse_profile(env.value("profile", "restaurant"));
    if (!profile) throw Error(ErrorKind::InvalidArgument, "unknown profile in suite");
    g.profile = *profile;
    g.width = env.value("width", g.width);
    g.height = env.value("height", g.height);
    g.rooms = env.value("rooms", g.rooms);
    g.containers = env.value("containers", g.containers);
    g.objects = env.value("objects", g.objects);
    g.min_tasks = env.value("min_tasks", g.min_tasks);
    g.max_tasks = env.value("max_tasks", g.max_tasks);
    g.validate();
    s.generator = g;
    s.first_seed = env.value("first_seed", std::uint64_t{0});
    s.count = env.value("count", 1);
    if (s.count < 1) throw Error(ErrorKind::InvalidArgument, "environment count must be positive");
  }
  if (doc.contains("regimes")) {
    s.regimes.clear();
    for (const auto& r : doc["regimes"]) {
      const auto regime = parse_regime(r.get<std::string>());
      if (!regime) throw Error(ErrorKind::InvalidArgument, "unknown regime " + r.dump());
      s.regimes.push_back(*regime);
    }
  }
  s.trial.sequence_length = doc.value("sequence_length", s.trial.sequence_length);
  s.seed = doc.value("seed", std::uint64_t{0});
  if (doc.contains("estimator")) {
    const std::string kind = doc["estimator"].value("kind", "oracle");
    if (kind == "learned") {
      s.estimator = EstimatorKind::Learned;
      s.model_file = resolve(doc["estimator"].at("model").get<std::string>());
    } else if (kind != "oracle") {
      throw Error(ErrorKind::InvalidArgument, "estimator kind must be oracle or learned");
    }
  }
  if (doc.contains("anticipation")) {
    const json& a = doc["anticipation"];
    s.trial.anticipation.samples = a.value("samples", s.trial.anticipation.samples);
    s.trial.anticipation.radius = a.value("radius", s.trial.anticipation.radius);
    s.trial.anticipation.max_added = a.value("max_added", s.trial.anticipation.max_added);
  }
  if (doc.contains("anneal")) {
    const json& a = doc["anneal"];
    s.trial.anneal.iterations = a.value("iterations", s.trial.anneal.iterations);
    s.trial.anneal.decay = a.value("decay", s.trial.anneal.decay);
    if (a.contains("t0") && !a["t0"].is_null()) s.trial.anneal.t0 = a["t0"].get<double>();
    s.trial.chains = a.value("chains", s.trial.chains);
    s.trial.anneal.validate();
  }
  if (doc.contains("budget")) {
    const json& b = doc["budget"];
    s.trial.budget.max_expansions = b.value("max_expansions", s.trial.budget.max_expansions);
    s.trial.budget.max_time = std::chrono::milliseconds(b.value("max_time_ms", s.trial.budget.max_time.count()));
    s.trial.budget.validate();
  }
  s.trial.fold_preparation = doc.value("fold_preparation", false);
  return s;
}

}  // namespace

Suite parse_suite(const std::string& text, const std::filesystem::path& base_dir) {
  try {
    return suite_from_json(json::parse(text), base_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("invalid suite: ") + e.what());
  }
}

Suite load_suite(const std::filesystem::path& path) {
  return parse_suite(read_file(path), path.parent_path());
}

std::vector<TrialResult> run_suite(const Suite& suite, const std::function<void(const TrialResult&)>& progress) {
  std::optional<RegressorModel> model;
  if (suite.estimator == EstimatorKind::Learned) {
    if (!suite.model_file) throw Error(ErrorKind::InvalidArgument, "learned estimator needs a model file");
    model = load_model(*suite.model_file);
  }
  std::vector<TrialResult> results;
  auto run_env = [&](const std::string& label, std::uint64_t key, const WorldState& s0, const TaskDistribution& dist) {
    std::unique_ptr<CostEstimator> estimator;
    if (model) estimator = std::make_unique<LearnedEstimator>(*model);
    else estimator = std::make_unique<OracleEstimator>(dist, suite.trial.budget);
    std::optional<Preparation> prepared;
    std::string prep_failure;
    for (Regime regime : suite.regimes) {
      TrialConfig cfg = suite.trial;
      cfg.environment = label;
      cfg.regime = regime;
      cfg.sequence_seed = Rng::mix(suite.seed, key);
      cfg.planning_seed = Rng::mix(suite.seed ^ 0x5EEDULL, key);
      if (prepares(regime) && !prepared && prep_failure.empty()) {
        try {
          prepared = run_preparation(cfg, s0, *estimator);
        } catch (const Error& e) {
          prep_failure = e.what();
        }
      }
      results.push_back(run_sequence(cfg, s0, dist, *estimator, prepared ? &*prepared : nullptr));
      if (progress) progress(results.back());
    }
  };
  if (suite.world_file) {
    const WorldState s0 = load_world(*suite.world_file);
    const TaskDistribution dist = load_distribution(*suite.distribution_file, s0.world());
    run_env(suite.world_file->stem().string(), 0, s0, dist);
    return results;
  }
  for (int k = 0; k < suite.count; ++k) {
    GeneratorConfig gen = *suite.generator;
    gen.seed = suite.first_seed + static_cast<std::uint64_t>(k);
    const std::string label = "env" + std::to_string(gen.seed);
    try {
      const WorldState s0 = generate_world(gen);
      const TaskDistribution dist = generate_distribution(s0, gen, Rng::mix(gen.seed, 1));
      run_env(label, gen.seed, s0, dist);
    } catch (const Error& e) {
      for (Regime regime : suite.regimes) {
        TrialResult r;
        r.environment = label;
        r.regime = regime;
        r.aborted = true;
        r.diagnostic = std::string("environment generation failed: ") + e.what();
        results.push_back(r);
        if (progress) progress(results.back());
      }
    }
  }
  return results;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fixed(double v, int decimals) {
  if (v == 0.0) v = 0.0;  // normalizes negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    rows.push_back(split_csv(line));
  }
  return rows;
}

std::string schema_line() { return "# antplan-csv v" + std::to_string(kCsvSchemaVersion) + "\n"; }

std::string file_safe(std::string s) {
  for (char& c : s)
    if (c == '+') c = '_';
  return s;
}

std::string trial_file(const TrialResult& r) {
  return "trial_" + file_safe(r.environment) + "_" + file_safe(to_string(r.regime)) + ".csv";
}

}  // namespace

std::string trial_csv(const TrialResult& r) {
  std::string out = schema_line() + "index,label,immediate,anticipatory,expansions,actions\n";
  for (const TaskRow& row : r.rows)
    out += std::to_string(row.index) + "," + quote(row.label) + "," + fixed(row.immediate, 3) + "," +
           fixed(row.anticipatory, 6) + "," + std::to_string(row.expansions) + "," + std::to_string(row.actions) + "\n";
  return out;
}

std::string trials_csv(const std::vector<TrialResult>& results) {
  std::string out = schema_line() +
                    "environment,regime,tasks,total,mean_cost,preparation_cost,estimate_before,estimate_after,"
                    "aborted,diagnostic\n";
  for (const TrialResult& r : results)
    out += quote(r.environment) + "," + to_string(r.regime) + "," + std::to_string(r.rows.size()) + "," +
           fixed(r.total, 3) + "," + fixed(r.mean_cost(), 6) + "," +
           (r.preparation_cost ? fixed(*r.preparation_cost, 3) : std::string()) + "," + fixed(r.estimate_before, 6) +
           "," + fixed(r.estimate_after, 6) + "," + (r.aborted ? "1" : "0") + "," + quote(r.diagnostic) + "\n";
  return out;
}

std::string summary_csv(const Summary& s) {
  std::string out = schema_line() + "regime,trials,mean_cost,reduction,mean_preparation_cost\n";
  for (const auto& st : s.regimes)
    out += std::string(to_string(st.regime)) + "," + std::to_string(st.trials) + "," + fixed(st.mean_cost, 6) + "," +
           fixed(st.reduction, 6) + "," + fixed(st.mean_preparation_cost, 6) + "\n";
  return out;
}

std::string curve_csv(const Summary& s) {
  std::string out = schema_line() + "index";
  for (const auto& st : s.regimes) out += std::string(",") + to_string(st.regime);
  out += "\n";
  for (int i = 0; i < s.sequence_length; ++i) {
    out += std::to_string(i);
    for (const auto& st : s.regimes) out += "," + fixed(st.curve[i], 6);
    out += "\n";
  }
  return out;
}

std::string tests_csv(const Summary& s) {
  std::string out = schema_line() + "better,worse,n,w_plus,z,p_value\n";
  for (const auto& c : s.comparisons)
    out += std::string(to_string(c.better)) + "," + to_string(c.worse) + "," + std::to_string(c.test.n) + "," +
           fixed(c.test.w_plus, 1) + "," + fixed(c.test.z, 6) + "," + fixed(c.test.p_value, 8) + "\n";
  return out;
}

std::string timing_csv(const std::vector<TrialResult>& results) {
  std::string out = schema_line() + "environment,regime,index,wall_ms\n";
  for (const TrialResult& r : results)
    for (const TaskRow& row : r.rows)
      out += quote(r.environment) + "," + to_string(r.regime) + "," + std::to_string(row.index) + "," +
             fixed(row.wall_ms, 3) + "\n";
  return out;
}

void write_results(const std::vector<TrialResult>& results, const std::filesystem::path& dir, bool timing) {
  std::filesystem::create_directories(dir);
  for (const TrialResult& r : results) write_file(dir / trial_file(r), trial_csv(r));
  write_file(dir / "trials.csv", trials_csv(results));
  const Summary s = aggregate(results);
  write_file(dir / "summary.csv", summary_csv(s));
  write_file(dir / "curve.csv", curve_csv(s));
  write_file(dir / "tests.csv", tests_csv(s));
  if (timing) write_file(dir / "timing.csv", timing_csv(results));
}

std::vector<TrialResult> read_results(const std::filesystem::path& dir) {
  std::vector<TrialResult> results;
  for (const auto& f : read_csv(dir / "trials.csv")) {
    if (f.size() < 10) throw Error(ErrorKind::Io, "malformed trials.csv row");
    TrialResult r;
    r.environment = f[0];
    const auto regime = parse_regime(f[1]);
    if (!regime) throw Error(ErrorKind::Io, "unknown regime '" + f[1] + "' in trials.csv");
    r.regime = *regime;
    r.total = std::stod(f[3]);
    if (!f[5].empty()) r.preparation_cost = std::stod(f[5]);
    r.estimate_before = std::stod(f[6]);
    r.estimate_after = std::stod(f[7]);
    r.aborted = f[8] == "1";
    r.diagnostic = f[9];
    for (const auto& row : read_csv(dir / trial_file(r))) {
      if (row.size() < 6) throw Error(ErrorKind::Io, "malformed row in " + trial_file(r));
      TaskRow t;
      t.index = std::stoi(row[0]);
      t.label = row[1];
      t.immediate = std::stod(row[2]);
      t.anticipatory = std::stod(row[3]);
      t.expansions = std::stoull(row[4]);
      t.actions = std::stoull(row[5]);
      r.rows.push_back(std::move(t));
    }
    results.push_back(std::move(r));
  }
  return results;
}

// ---------------------------------------------------------------------------
// Plot

std::string plot_svg(const Summary& s) {
  const double width = 640, height = 400, left = 60, right = 170, top = 30, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  double ymax = 0.0;
  for (const auto& st : s.regimes)
    for (double v : st.curve) ymax = std::max(ymax, v);
  ymax = ymax > 0 ? std::ceil(ymax * 1.1) : 1.0;
  const int n = std::max(1, s.sequence_length - 1);
  auto px = [&](int i) { return left + pw * i / n; };
  auto py = [&](double v) { return top + ph * (1.0 - v / ymax); };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(v) + 4, 1) << "\" text-anchor=\"end\">" << fixed(v, 1)
        << "</text>\n";
  }
  for (int i = 0; i < s.sequence_length; ++i)
    out << "<text x=\"" << fixed(px(i), 1) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << i + 1
        << "</text>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">task index</text>\n";
  out << "<text x=\"14\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 14 " << top + ph / 2
      << ")\" text-anchor=\"middle\">average cost per task</text>\n";
  for (std::size_t k = 0; k < s.regimes.size(); ++k) {
    const auto& st = s.regimes[k];
    const char* color = kColors[static_cast<int>(st.regime)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (int i = 0; i < s.sequence_length; ++i) out << (i ? " " : "") << fixed(px(i), 1) << "," << fixed(py(st.curve[i]), 1);
    out << "\"/>\n";
    const double ly = top + 10 + 18.0 * k;
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << to_string(st.regime) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace antplan
