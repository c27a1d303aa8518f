#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "antplan/anticipation.hpp"
#include "antplan/dataset.hpp"
#include "antplan/regressor.hpp"

namespace antplan {

/// Regressor weights together with the feature layout they were trained on.
struct RegressorModel {
  FeatureSpec spec;
  GraphRegressor<double> net;
};

/// JSON document with format, version, shape, feature vocabulary, the flat
/// parameter vector and the normalization running statistics. Numbers are
/// written with round-trip precision.
std::string dump_model(const RegressorModel& model);
RegressorModel parse_model(const std::string& text);
void save_model(const RegressorModel& model, const std::filesystem::path& path);
RegressorModel load_model(const std::filesystem::path& path);

class LearnedEstimator final : public CostEstimator {
 public:
  explicit LearnedEstimator(RegressorModel model) : model_(std::move(model)) {}
  double estimate(const WorldState& state) const override;
  std::string name() const override { return "learned"; }
  const RegressorModel& model() const { return model_; }

 private:
  RegressorModel model_;
};

struct TrainingConfig {
  int layers = 4;
  int hidden = 64;
  int epochs = 10;
  int batch_size = 8;
  double learning_rate = 0.01;
  int step_size = 1000;  ///< optimizer steps between learning-rate decays
  double step_gamma = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainingResult {
  RegressorModel model;
  std::vector<double> epoch_loss;  ///< mean batch MAE per epoch
  std::vector<double> step_loss;   ///< MAE per optimizer step
};

/// Adagrad on the mean absolute error with step decay. Deterministic per seed.
/// Throws empty-dataset, shape-mismatch, nonfinite-loss.
TrainingResult train(const Dataset& data, const TrainingConfig& cfg);

/// Predictions of `model` for every datum, in order.
std::vector<double> predict_all(const RegressorModel& model, const Dataset& data);

}  // namespace antplan
