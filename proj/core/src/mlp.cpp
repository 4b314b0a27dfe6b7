#include "essc/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "essc/error.hpp"
#include "essc/manifest.hpp"
#include "parallel.hpp"

namespace essc {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double tansig(double z) { return std::tanh(z); }

MlpModel MlpModel::zeros(int n_in, int n_hidden, int n_out) {
  MlpModel m;
  m.w1 = MatrixXd::Zero(n_hidden, n_in);
  m.b1 = VectorXd::Zero(n_hidden);
  m.w2 = MatrixXd::Zero(n_out, n_hidden);
  m.b2 = VectorXd::Zero(n_out);
  m.input_mean = VectorXd::Zero(n_in);
  m.input_scale = VectorXd::Ones(n_in);
  m.mode = n_in == static_cast<int>(kSscFeatureCount) ? FeatureMode::Ssc4 : FeatureMode::Essc30;
  return m;
}

void MlpModel::check_shapes() const {
  if (b1.size() != w1.rows() || w2.cols() != w1.rows() || b2.size() != w2.rows() ||
      input_mean.size() != w1.cols() || input_scale.size() != w1.cols())
    throw ShapeError("inconsistent network shapes");
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite() || !input_mean.allFinite() ||
      !input_scale.allFinite())
    throw ShapeError("network contains non-finite parameters");
}

namespace {

// Row-wise softmax, shifted by the row maximum.
MatrixXd softmax_rows(const MatrixXd& z) {
  MatrixXd y = z;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double mx = y.row(i).maxCoeff();
    y.row(i) = (y.row(i).array() - mx).exp();
    y.row(i) /= y.row(i).sum();
  }
  return y;
}

MatrixXd hidden_activations(const MlpModel& model, const MatrixXd& inputs) {
  MatrixXd a = inputs * model.w1.transpose();
  a.rowwise() += model.b1.transpose();
  return a.array().tanh().matrix();
}

}  // namespace

MatrixXd forward_normalized(const MlpModel& model, const MatrixXd& inputs) {
  if (inputs.cols() != model.n_in()) throw ShapeError("input width does not match the network");
  const MatrixXd h = hidden_activations(model, inputs);
  MatrixXd z = h * model.w2.transpose();
  z.rowwise() += model.b2.transpose();
  return softmax_rows(z);
}

VectorXd forward(const MlpModel& model, std::span<const double> features) {
  if (static_cast<int>(features.size()) != model.n_in())
    throw ShapeError("feature vector has " + std::to_string(features.size()) + " values, network expects " +
                     std::to_string(model.n_in()));
  const Eigen::Map<const VectorXd> x(features.data(), static_cast<Eigen::Index>(features.size()));
  const VectorXd xn = ((x - model.input_mean).array() / model.input_scale.array()).matrix();
  VectorXd a = model.w1 * xn + model.b1;
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = tansig(a[i]);
  VectorXd z = model.w2 * a + model.b2;
  const double mx = z.maxCoeff();
  VectorXd y = (z.array() - mx).exp().matrix();
  return y / y.sum();
}

VectorXd forward(const MlpModel& model, const EsscFeatures& features) {
  if (features.mode != model.mode) throw ModeMismatchError("feature mode does not match the model");
  return forward(model, features.values);
}

MatrixXd one_hot(std::span<const int> labels, int n_classes) {
  MatrixXd d = MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), n_classes);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] < 1 || labels[j] > n_classes) throw ParameterError("label outside 1..n_classes");
    d(static_cast<Eigen::Index>(j), labels[j] - 1) = 1.0;
  }
  return d;
}

double cross_entropy(const MatrixXd& targets, const MatrixXd& predictions, double eps) {
  if (targets.rows() != predictions.rows() || targets.cols() != predictions.cols())
    throw ShapeError("target and prediction batches differ in shape");
  if (targets.rows() == 0) throw ShapeError("empty batch");
  const ArrayXXd y = predictions.array().max(eps).min(1.0 - eps);
  const ArrayXXd d = targets.array();
  const double total = (d * y.log() + (1.0 - d) * (1.0 - y).log()).sum();
  return -total / static_cast<double>(targets.rows());
}

double loss_and_gradient(const MlpModel& model, const MatrixXd& inputs, const MatrixXd& targets, Gradients& grad,
                         double eps) {
  const auto m = static_cast<double>(inputs.rows());
  const MatrixXd h = hidden_activations(model, inputs);
  MatrixXd z = h * model.w2.transpose();
  z.rowwise() += model.b2.transpose();
  const MatrixXd y = softmax_rows(z);

  const ArrayXXd yc = y.array().max(eps).min(1.0 - eps);
  const ArrayXXd d = targets.array();
  const double loss = -(d * yc.log() + (1.0 - d) * (1.0 - yc).log()).sum() / m;

  // dL/dy, zero where the clip is active.
  const ArrayXXd inside = ((y.array() > eps) && (y.array() < 1.0 - eps)).cast<double>();
  const ArrayXXd g = inside * (-d / yc + (1.0 - d) / (1.0 - yc)) / m;
  // Softmax Jacobian: dz_k = y_k (g_k - sum_i g_i y_i).
  const VectorXd gy = (g * y.array()).rowwise().sum().matrix();
  MatrixXd dz = (y.array() * (g.colwise() - gy.array())).matrix();

  grad.w2.noalias() = dz.transpose() * h;
  grad.b2 = dz.colwise().sum().transpose();
  MatrixXd da = (dz * model.w2).array() * (1.0 - h.array().square());
  grad.w1.noalias() = da.transpose() * inputs;
  grad.b1 = da.colwise().sum().transpose();
  return loss;
}

void fit_normalization(MlpModel& model, const MatrixXd& raw) {
  const auto n = static_cast<double>(raw.rows());
  model.input_mean = raw.colwise().mean().transpose();
  model.input_scale.resize(raw.cols());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const double var = (raw.col(j).array() - model.input_mean[j]).square().sum() / n;
    const double sd = std::sqrt(var);
    model.input_scale[j] = sd > 0.0 ? sd : 1.0;
  }
}

MatrixXd normalize_inputs(const MlpModel& model, const MatrixXd& raw) {
  MatrixXd x = raw;
  x.rowwise() -= model.input_mean.transpose();
  x.array().rowwise() /= model.input_scale.transpose().array();
  return x;
}

MatrixXd dataset_matrix(const FeatureDataset& dataset) {
  MatrixXd x(static_cast<Eigen::Index>(dataset.size()), static_cast<Eigen::Index>(dataset.width()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto r = dataset.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j];
  }
  return x;
}

namespace {

struct CycleOutcome {
  MlpModel model;
  std::vector<double> history;
  CycleResult result;
};

CycleOutcome run_cycle(const MlpModel& shape, const MatrixXd& x, const MatrixXd& d, const TrainingOptions& opt,
                       RngStream rng) {
  CycleOutcome out;
  MlpModel& model = out.model;
  model = shape;
  auto init = [&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-opt.init_range, opt.init_range);
  };
  init(model.w1);
  init(model.b1);
  init(model.w2);
  init(model.b2);

  Gradients g;
  Gradients v{MatrixXd::Zero(model.w1.rows(), model.w1.cols()), VectorXd::Zero(model.b1.size()),
              MatrixXd::Zero(model.w2.rows(), model.w2.cols()), VectorXd::Zero(model.b2.size())};

  auto& hist = out.history;
  hist.reserve(static_cast<std::size_t>(opt.max_epochs));
  for (int epoch = 0; epoch < opt.max_epochs; ++epoch) {
    const double loss = loss_and_gradient(model, x, d, g, opt.clip_eps);
    if (!std::isfinite(loss)) {
      out.result.diverged = true;
      break;
    }
    hist.push_back(loss);
    const auto e = hist.size() - 1;
    if (opt.patience > 0 && e >= static_cast<std::size_t>(opt.patience) &&
        hist[e - static_cast<std::size_t>(opt.patience)] - hist[e] < opt.min_improvement)
      break;
    v.w1 = opt.momentum * v.w1 - opt.learning_rate * g.w1;
    v.b1 = opt.momentum * v.b1 - opt.learning_rate * g.b1;
    v.w2 = opt.momentum * v.w2 - opt.learning_rate * g.w2;
    v.b2 = opt.momentum * v.b2 - opt.learning_rate * g.b2;
    model.w1 += v.w1;
    model.b1 += v.b1;
    model.w2 += v.w2;
    model.b2 += v.b2;
  }
  out.result.epochs = static_cast<int>(hist.size());
  if (!out.result.diverged) {
    const double terminal = cross_entropy(d, forward_normalized(model, x), opt.clip_eps);
    if (!std::isfinite(terminal) || !model.w1.allFinite() || !model.w2.allFinite())
      out.result.diverged = true;
    else
      out.result.terminal_ce = terminal;
  }
  return out;
}

}  // namespace

TrainedModel train(const FeatureDataset& dataset, int n_hidden, const TrainingOptions& options, const RngStream& rng) {
  if (dataset.empty()) throw CoverageError("training dataset is empty");
  const auto counts = dataset.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw CoverageError("class " + std::to_string(c + 1) + " is missing from the training set");
  }
  if (n_hidden < 1) throw ParameterError("hidden layer needs at least one neuron");
  if (options.cycles < 1) throw ParameterError("training needs at least one cycle");

  MlpModel shape = MlpModel::zeros(static_cast<int>(dataset.width()), n_hidden, kClassCount);
  shape.mode = dataset.mode();
  const MatrixXd raw = dataset_matrix(dataset);
  fit_normalization(shape, raw);
  const MatrixXd x = normalize_inputs(shape, raw);
  const MatrixXd d = one_hot(dataset.labels(), kClassCount);

  std::vector<CycleOutcome> outcomes(static_cast<std::size_t>(options.cycles));
  detail::parallel_for(outcomes.size(), options.jobs, [&](std::size_t c) {
    outcomes[c] = run_cycle(shape, x, d, options, rng.split(static_cast<std::uint64_t>(c)));
  });

  TrainedModel best;
  best.report.cycles = options.cycles;
  double best_ce = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < outcomes.size(); ++c) {
    best.report.cycle_results.push_back(outcomes[c].result);
    if (outcomes[c].result.diverged) {
      std::cerr << "warning: training cycle " << c << " (n_hidden=" << n_hidden << ") diverged; discarded\n";
      continue;
    }
    if (outcomes[c].result.terminal_ce < best_ce) {
      best_ce = outcomes[c].result.terminal_ce;
      best.report.chosen_cycle = static_cast<int>(c);
    }
  }
  if (best.report.chosen_cycle < 0) throw TrainingError("every training cycle diverged");
  auto& chosen = outcomes[static_cast<std::size_t>(best.report.chosen_cycle)];
  best.model = std::move(chosen.model);
  best.report.ce_history = std::move(chosen.history);
  best.report.final_ce = best_ce;
  return best;
}

ArchitectureSearch select_architecture(const FeatureDataset& dataset, std::span<const int> hidden_sizes,
                                       const TrainingOptions& options, const RngStream& rng) {
  if (hidden_sizes.empty()) throw ParameterError("hidden-size range is empty");
  ArchitectureSearch search;
  double best_ce = std::numeric_limits<double>::infinity();
  for (int h : hidden_sizes) {
    TrainedModel t = train(dataset, h, options, rng.split(static_cast<std::uint64_t>(h)));
    search.table.push_back({h, t.report.final_ce, t.report.chosen_cycle});
    if (t.report.final_ce < best_ce) {
      best_ce = t.report.final_ce;
      search.best = std::move(t);
    }
  }
  return search;
}

int sample_class(const VectorXd& probabilities, RngStream& rng, DecisionRule rule) {
  if (rule == DecisionRule::Argmax) {
    Eigen::Index arg = 0;
    probabilities.maxCoeff(&arg);
    return static_cast<int>(arg) + 1;
  }
  const double u = rng.uniform(0.0, 1.0);
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(probabilities.size());
}

int classify(const MlpModel& model, std::span<const double> features, RngStream& rng, DecisionRule rule) {
  return sample_class(forward(model, features), rng, rule);
}

// --- serialization -------------------------------------------------------------

namespace {

constexpr const char* kModelFormat = "essc-mlp";
constexpr int kModelVersion = 1;

nlohmann::json flat(const MatrixXd& m) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

MatrixXd unflat(const nlohmann::json& a, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != rows * cols)
    throw FormatError(std::string("model field '") + name + "' has the wrong size");
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = a.at(static_cast<std::size_t>(i * cols + j)).get<double>();
  return m;
}

}  // namespace

std::string model_to_json(const MlpModel& model) {
  model.check_shapes();
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["n_in"] = model.n_in();
  j["n_hidden"] = model.n_hidden();
  j["n_out"] = model.n_out();
  j["mode"] = std::string(to_string(model.mode));
  j["pulse_family"] = model.pulse_family;
  j["seed"] = model.seed;
  j["w1"] = flat(model.w1);
  j["b1"] = flat(model.b1);
  j["w2"] = flat(model.w2);
  j["b2"] = flat(model.b2);
  j["input_mean"] = flat(model.input_mean);
  j["input_scale"] = flat(model.input_scale);
  return j.dump(1) + "\n";
}

MlpModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model JSON does not parse: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw FormatError("not an essc model file");
    if (j.at("version").get<int>() != kModelVersion) throw FormatError("unsupported model version");
    const int n_in = j.at("n_in").get<int>();
    const int n_hidden = j.at("n_hidden").get<int>();
    const int n_out = j.at("n_out").get<int>();
    MlpModel m;
    m.w1 = unflat(j.at("w1"), n_hidden, n_in, "w1");
    m.b1 = unflat(j.at("b1"), n_hidden, 1, "b1");
    m.w2 = unflat(j.at("w2"), n_out, n_hidden, "w2");
    m.b2 = unflat(j.at("b2"), n_out, 1, "b2");
    m.input_mean = unflat(j.at("input_mean"), n_in, 1, "input_mean");
    m.input_scale = unflat(j.at("input_scale"), n_in, 1, "input_scale");
    m.mode = parse_feature_mode(j.at("mode").get<std::string>());
    m.pulse_family = j.at("pulse_family").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.check_shapes();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model JSON: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const MlpModel& model) {
  write_file_atomic(path, model_to_json(model));
}

MlpModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

}  // namespace essc
