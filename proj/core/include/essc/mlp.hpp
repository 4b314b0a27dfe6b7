#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "essc/dataset.hpp"
#include "essc/features.hpp"
#include "essc/rng.hpp"

namespace essc {

/// tansig(z) = 2 / (1 + exp(-2z)) - 1.
double tansig(double z);

/// One-hidden-layer perceptron: tansig hidden layer, softmax output. Inputs
/// are z-scored with constants fitted on the training set.
struct MlpModel {
  Eigen::MatrixXd w1;  // n_hidden x n_in
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // n_out x n_hidden
  Eigen::VectorXd b2;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;  // divide by this after centering

  // Metadata carried into the serialized model.
  FeatureMode mode = FeatureMode::Essc30;
  std::string pulse_family;
  std::uint64_t seed = 0;

  static MlpModel zeros(int n_in, int n_hidden, int n_out);

  int n_in() const { return static_cast<int>(w1.cols()); }
  int n_hidden() const { return static_cast<int>(w1.rows()); }
  int n_out() const { return static_cast<int>(w2.rows()); }

  void check_shapes() const;
};

/// Softmax probabilities for one raw (un-normalized) feature vector.
Eigen::VectorXd forward(const MlpModel& model, std::span<const double> features);
Eigen::VectorXd forward(const MlpModel& model, const EsscFeatures& features);
/// Row-wise probabilities for a batch of already-normalized inputs.
Eigen::MatrixXd forward_normalized(const MlpModel& model, const Eigen::MatrixXd& inputs);

/// One-hot targets, one row per exercise.
Eigen::MatrixXd one_hot(std::span<const int> labels, int n_classes);

/// Average (over exercises) of the per-class binary cross-entropy terms.
double cross_entropy(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& predictions, double eps = 1e-7);

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

/// Loss and its back-propagated gradient on normalized inputs.
double loss_and_gradient(const MlpModel& model,
                         const Eigen::MatrixXd& inputs,
                         const Eigen::MatrixXd& targets,
                         Gradients& grad,
                         double eps = 1e-7);

/// Fits input_mean / input_scale to the column statistics of `raw`.
void fit_normalization(MlpModel& model, const Eigen::MatrixXd& raw);
Eigen::MatrixXd normalize_inputs(const MlpModel& model, const Eigen::MatrixXd& raw);
Eigen::MatrixXd dataset_matrix(const FeatureDataset& dataset);

struct TrainingOptions {
  int cycles = 50;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int max_epochs = 2000;
  int patience = 50;
  double min_improvement = 1e-6;
  double init_range = 0.1;
  double clip_eps = 1e-7;
  int jobs = 1;
};

struct CycleResult {
  double terminal_ce = 0.0;
  int epochs = 0;
  bool diverged = false;
};

struct TrainingReport {
  std::vector<double> ce_history;  // per epoch, chosen cycle
  double final_ce = 0.0;
  int cycles = 0;
  int chosen_cycle = -1;
  std::vector<CycleResult> cycle_results;
};

struct TrainedModel {
  MlpModel model;
  TrainingReport report;
};

/// `cycles` random restarts of full-batch momentum gradient descent; keeps the
/// cycle with the lowest terminal cross-entropy.
TrainedModel train(const FeatureDataset& dataset, int n_hidden, const TrainingOptions& options, const RngStream& rng);

struct ArchitectureRow {
  int n_hidden = 0;
  double ce_min = 0.0;
  int chosen_cycle = -1;
};

struct ArchitectureSearch {
  TrainedModel best;
  std::vector<ArchitectureRow> table;
};

ArchitectureSearch select_architecture(const FeatureDataset& dataset,
                                       std::span<const int> hidden_sizes,
                                       const TrainingOptions& options,
                                       const RngStream& rng);

enum class DecisionRule { WeightedRandom, Argmax };

/// Output class (1-based) drawn from the softmax distribution, or its argmax.
int classify(const MlpModel& model, std::span<const double> features, RngStream& rng,
             DecisionRule rule = DecisionRule::WeightedRandom);
int sample_class(const Eigen::VectorXd& probabilities, RngStream& rng,
                 DecisionRule rule = DecisionRule::WeightedRandom);

std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const MlpModel& model);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace essc
