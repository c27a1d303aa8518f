#include "antplan/estimator.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "antplan/error.hpp"
#include "antplan/rng.hpp"
#include "antplan/world_io.hpp"

namespace antplan {

using nlohmann::json;

std::string dump_model(const RegressorModel& model) {
  const auto& net = model.net;
  json doc;
  doc["format"] = "antplan-regressor";
  doc["version"] = 1;
  doc["profile"] = to_string(model.spec.profile);
  doc["names"] = model.spec.names;
  doc["shape"] = {{"layers", net.shape().layers}, {"hidden", net.shape().hidden}, {"features", net.shape().features}};
  const auto& theta = net.parameters();
  doc["parameters"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  json mean = json::array(), var = json::array();
  for (int l = 0; l < net.shape().layers; ++l) {
    const auto& m = net.running_mean()[l];
    const auto& v = net.running_var()[l];
    mean.push_back(std::vector<double>(m.data(), m.data() + m.size()));
    var.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  }
  doc["running_mean"] = std::move(mean);
  doc["running_var"] = std::move(var);
  return doc.dump(2) + "\n";
}

RegressorModel parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("model is not valid JSON: ") + e.what());
  }
  if (doc.value("format", "") != "antplan-regressor" || doc.value("version", 0) != 1)
    throw Error(ErrorKind::Io, "not an antplan-regressor version 1 document");
  const auto profile = parse_profile(doc.at("profile").get<std::string>());
  if (!profile) throw Error(ErrorKind::Io, "unknown profile in model");
  FeatureSpec spec{*profile, doc.at("names").get<std::vector<std::string>>()};
  RegressorShape shape{doc["shape"].at("layers").get<int>(), doc["shape"].at("hidden").get<int>(),
                       doc["shape"].at("features").get<int>()};
  if (shape.features != spec.length()) throw Error(ErrorKind::ShapeMismatch, "feature count disagrees with names");
  RegressorModel model{spec, GraphRegressor<double>(shape)};
  const auto theta = doc.at("parameters").get<std::vector<double>>();
  if (theta.size() != shape.parameter_count())
    throw Error(ErrorKind::ShapeMismatch, "parameter count " + std::to_string(theta.size()) + " != expected " +
                                              std::to_string(shape.parameter_count()));
  model.net.parameters() = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  const auto& mean = doc.at("running_mean");
  const auto& var = doc.at("running_var");
  if (static_cast<int>(mean.size()) != shape.layers || static_cast<int>(var.size()) != shape.layers)
    throw Error(ErrorKind::ShapeMismatch, "running statistics do not match the layer count");
  for (int l = 0; l < shape.layers; ++l) {
    const auto m = mean[l].get<std::vector<double>>();
    const auto v = var[l].get<std::vector<double>>();
    if (static_cast<int>(m.size()) != shape.hidden || static_cast<int>(v.size()) != shape.hidden)
      throw Error(ErrorKind::ShapeMismatch, "running statistics do not match the hidden width");
    model.net.running_mean()[l] = Eigen::Map<const Eigen::RowVectorXd>(m.data(), shape.hidden);
    model.net.running_var()[l] = Eigen::Map<const Eigen::RowVectorXd>(v.data(), shape.hidden);
  }
  return model;
}

void save_model(const RegressorModel& model, const std::filesystem::path& path) { write_file(path, dump_model(model)); }

RegressorModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

double LearnedEstimator::estimate(const WorldState& state) const {
  return model_.net.predict(convert_to_graph(state, model_.spec));
}

void TrainingConfig::validate() const {
  if (layers < 1 || hidden < 1) throw Error(ErrorKind::InvalidArgument, "layers and hidden must be positive");
  if (epochs < 1 || batch_size < 1) throw Error(ErrorKind::InvalidArgument, "epochs and batch size must be positive");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
  if (step_size < 1 || !(step_gamma > 0.0 && step_gamma <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "step size must be positive and gamma in (0, 1]");
}

TrainingResult train(const Dataset& data, const TrainingConfig& cfg) {
  cfg.validate();
  if (data.data.empty()) throw Error(ErrorKind::EmptyDataset, "no training data");
  const int features = data.spec.length();
  std::vector<CanonicalGraph<double>> graphs;
  graphs.reserve(data.data.size());
  double label_mean = 0.0;
  for (const TrainingDatum& d : data.data) {
    if (d.graph.features.cols() != features)
      throw Error(ErrorKind::ShapeMismatch, "datum feature length " + std::to_string(d.graph.features.cols()) +
                                                " != " + std::to_string(features));
    graphs.push_back(canonicalize<double>(d.graph));
    label_mean += d.label;
  }
  label_mean /= static_cast<double>(data.data.size());

  TrainingResult result{RegressorModel{data.spec, GraphRegressor<double>({cfg.layers, cfg.hidden, features})}, {}, {}};
  auto& net = result.model.net;
  net.initialize(cfg.seed, label_mean);

  Rng rng(Rng::mix(cfg.seed, 1));
  Eigen::VectorXd accum = Eigen::VectorXd::Zero(net.parameters().size());
  Eigen::VectorXd grad;
  std::vector<std::size_t> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<const CanonicalGraph<double>*> batch;
      std::vector<double> labels;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&graphs[order[i]]);
        labels.push_back(data.data[order[i]].label);
      }
      double loss = 0.0;
      net.gradient(
          batch,
          [&](const std::vector<double>& out) {
            std::vector<double> d(out.size());
            for (std::size_t g = 0; g < out.size(); ++g) {
              const double r = out[g] - labels[g];
              loss += std::abs(r);
              d[g] = (r > 0 ? 1.0 : r < 0 ? -1.0 : 0.0) / static_cast<double>(out.size());
            }
            loss /= static_cast<double>(out.size());
            return d;
          },
          grad, true);
      if (!std::isfinite(loss) || !grad.allFinite())
        throw Error(ErrorKind::NonfiniteLoss, "epoch " + std::to_string(epoch + 1) + ", step " +
                                                  std::to_string(step + 1) + ": loss " + std::to_string(loss));
      const double lr = cfg.learning_rate * std::pow(cfg.step_gamma, static_cast<double>(step / cfg.step_size));
      accum.array() += grad.array().square();
      net.parameters().array() -= lr * grad.array() / (accum.array().sqrt() + 1e-10);
      result.step_loss.push_back(loss);
      epoch_sum += loss;
      ++batches;
      ++step;
    }
    result.epoch_loss.push_back(epoch_sum / batches);
  }
  return result;
}

std::vector<double> predict_all(const RegressorModel& model, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.data.size());
  for (const TrainingDatum& d : data.data) out.push_back(model.net.predict(d.graph));
  return out;
}

}  // namespace antplan
