#include "antplan/dataset.hpp"

#include <json.hpp>

#include "antplan/anticipation.hpp"
#include "antplan/error.hpp"
#include "antplan/rng.hpp"
#include "antplan/world_io.hpp"

namespace antplan {

using nlohmann::json;

Dataset generate_dataset(const DatasetConfig& cfg) {
  if (cfg.states < 1 || cfg.states_per_world < 1 || cfg.max_chain < 0)
    throw Error(ErrorKind::InvalidArgument, "states, states-per-world must be positive");
  Dataset ds;
  ds.spec = FeatureSpec::for_profile(cfg.generator.profile);
  Rng rng(cfg.seed);
  for (std::uint64_t env = 0; static_cast<int>(ds.data.size()) < cfg.states; ++env) {
    GeneratorConfig gen = cfg.generator;
    gen.seed = Rng::mix(cfg.seed, env);
    const WorldState s0 = generate_world(gen);
    TaskDistribution dist;
    try {
      dist = generate_distribution(s0, gen, Rng::mix(gen.seed, 1));
    } catch (const Error& e) {
      ds.skipped.push_back("environment " + std::to_string(env) + ": " + e.what());
      continue;
    }
    const OracleEstimator oracle(dist, cfg.budget);
    WorldState state = s0;
    for (int i = 0; i < cfg.states_per_world && static_cast<int>(ds.data.size()) < cfg.states; ++i) {
      state = s0;
      const int steps = i == 0 ? 0 : rng.range(1, std::max(1, cfg.max_chain));
      for (int s = 0; s < steps; ++s) state = perturb(state, rng.next());
      try {
        ds.data.push_back({convert_to_graph(state, ds.spec), oracle.estimate(state)});
      } catch (const UnsolvableTask& e) {
        ds.skipped.push_back("environment " + std::to_string(env) + " state " + std::to_string(i) + ": " +
                             e.what());
      }
    }
  }
  return ds;
}

std::string dump_dataset(const Dataset& ds) {
  json doc;
  doc["format"] = "antplan-dataset";
  doc["version"] = 1;
  doc["profile"] = to_string(ds.spec.profile);
  doc["names"] = ds.spec.names;
  doc["feature_length"] = ds.spec.length();
  json data = json::array();
  for (const TrainingDatum& d : ds.data) {
    json nodes = json::array();
    for (int i = 0; i < d.graph.node_count(); ++i) {
      json row = json::array();
      for (int j = 0; j < d.graph.features.cols(); ++j) row.push_back(d.graph.features(i, j));
      nodes.push_back(std::move(row));
    }
    json edges = json::array();
    for (auto [a, b] : d.graph.edges) edges.push_back({a, b});
    data.push_back({{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"label", d.label}});
  }
  doc["data"] = std::move(data);
  doc["skipped"] = ds.skipped;
  return doc.dump(2) + "\n";
}

Dataset parse_dataset(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("dataset is not valid JSON: ") + e.what());
  }
  if (doc.value("format", "") != "antplan-dataset" || doc.value("version", 0) != 1)
    throw Error(ErrorKind::Io, "not an antplan-dataset version 1 document");
  Dataset ds;
  const auto profile = parse_profile(doc.at("profile").get<std::string>());
  if (!profile) throw Error(ErrorKind::Io, "unknown profile in dataset");
  ds.spec = FeatureSpec{*profile, doc.at("names").get<std::vector<std::string>>()};
  const int length = doc.at("feature_length").get<int>();
  if (length != ds.spec.length()) throw Error(ErrorKind::ShapeMismatch, "feature length disagrees with names");
  for (const auto& d : doc.at("data")) {
    TrainingDatum datum;
    const auto& nodes = d.at("nodes");
    datum.graph.features.resize(static_cast<Eigen::Index>(nodes.size()), length);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (static_cast<int>(nodes[i].size()) != length)
        throw Error(ErrorKind::ShapeMismatch, "node feature row has the wrong length");
      for (int j = 0; j < length; ++j) datum.graph.features(static_cast<Eigen::Index>(i), j) = nodes[i][j].get<double>();
    }
    for (const auto& e : d.at("edges")) datum.graph.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    datum.label = d.at("label").get<double>();
    ds.data.push_back(std::move(datum));
  }
  if (doc.contains("skipped")) ds.skipped = doc["skipped"].get<std::vector<std::string>>();
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) { write_file(path, dump_dataset(ds)); }

Dataset load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

}  // namespace antplan
