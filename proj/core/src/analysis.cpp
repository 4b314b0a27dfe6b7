#include "essc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "essc/error.hpp"
#include "parallel.hpp"

namespace essc {

long ConfusionMatrix::row_sum(int target) const {
  const auto& row = counts.at(static_cast<std::size_t>(target - 1));
  return std::accumulate(row.begin(), row.end(), 0L);
}

long ConfusionMatrix::total() const {
  long t = 0;
  for (int c = 1; c <= kClassCount; ++c) t += row_sum(c);
  return t;
}

double ConfusionMatrix::accuracy() const {
  const long t = total();
  if (t == 0) return 0.0;
  long diag = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) diag += counts[c][c];
  return static_cast<double>(diag) / static_cast<double>(t);
}

long ConfusionMatrix::pair_confusion(int a, int b) const {
  const auto i = static_cast<std::size_t>(a - 1);
  const auto j = static_cast<std::size_t>(b - 1);
  return counts.at(i).at(j) + counts.at(j).at(i);
}

ConfusionMatrix evaluate_confusion(const FeatureDataset& test, const Classifier& classifier, const RngStream& rng) {
  ConfusionMatrix cm;
  cm.mode = test.mode();
  for (std::size_t i = 0; i < test.size(); ++i) {
    RngStream stream = rng.split(static_cast<std::uint64_t>(i));
    const int target = test.label(i);
    const int output = classifier(test.row(i), target, stream);
    if (output < 1 || output > kClassCount)
      throw ParameterError("classifier returned class " + std::to_string(output));
    ++cm.counts[static_cast<std::size_t>(target - 1)][static_cast<std::size_t>(output - 1)];
  }
  return cm;
}

ConfusionMatrix evaluate_confusion(const MlpModel& model, const FeatureDataset& test, const RngStream& rng,
                                   DecisionRule rule) {
  if (model.mode != test.mode() || model.n_in() != static_cast<int>(test.width()))
    throw ModeMismatchError("model was trained in " + std::string(to_string(model.mode)) + " mode, test set is " +
                            std::string(to_string(test.mode())));
  return evaluate_confusion(
      test, [&](std::span<const double> x, int, RngStream& r) { return classify(model, x, r, rule); }, rng);
}

// --- sensitivity -----------------------------------------------------------

double sensitivity_rate() { return (std::log(10.0) - std::log(0.01)) / (kSensitivitySteps - 1); }

double sensitivity_amplitude() { return 0.01 * std::exp(-sensitivity_rate()); }

double sensitivity_step(int n) {
  if (n < 1 || n > kSensitivitySteps) throw ParameterError("sensitivity step outside 1..30");
  return sensitivity_amplitude() * std::exp(sensitivity_rate() * n);
}

double comparability_divisor(std::size_t feature_index) {
  switch (feature_index % kParamsPerSource) {
    case 2:  // MA
    case 3:  // DA
      return 2.0;
    case 5:  // Df2
      return 4.0;
    case 6:  // Df3
      return 8.0;
    default:
      return 1.0;
  }
}

SensitivityEntry sensitivity_scan(const MlpModel& model, std::span<const double> class_mean, int target_class,
                                  std::size_t feature_index) {
  if (static_cast<int>(class_mean.size()) != model.n_in()) throw ShapeError("class-mean width does not match model");
  if (feature_index >= class_mean.size()) throw ParameterError("feature index out of range");
  if (target_class < 1 || target_class > model.n_out()) throw ParameterError("target class out of range");

  SensitivityEntry e;
  e.class_id = target_class;
  e.feature_index = feature_index;
  const auto t = static_cast<Eigen::Index>(target_class - 1);
  e.base_probability = forward(model, class_mean)[t];
  if (!(e.base_probability >= kSensitivityThreshold)) {
    e.s_p = kSensitivityMax;
    e.crossing_step = 0;
    e.saturated_high = true;
    return e;
  }

  std::vector<double> x(class_mean.begin(), class_mean.end());
  const double base = x[feature_index];
  const double div = comparability_divisor(feature_index);
  e.crossing_step = -1;
  for (int n = 1; n <= kSensitivitySteps && e.crossing_step < 0; ++n) {
    const double delta = sensitivity_step(n);
    for (double sign : {1.0, -1.0}) {
      x[feature_index] = (base / div + sign * delta) * div;
      if (forward(model, x)[t] < kSensitivityThreshold) {
        e.crossing_step = n;
        e.delta_90 = delta;
        break;
      }
    }
  }
  const double raw = e.crossing_step > 0 ? 1.0 / e.delta_90 : kSensitivityMin;
  e.s_p = std::clamp(raw, kSensitivityMin, kSensitivityMax);
  e.saturated_high = e.s_p >= kSensitivityMax;
  e.saturated_low = e.s_p <= kSensitivityMin;
  return e;
}

double SensitivityResult::saturated_high_fraction(int class_id) const {
  std::size_t n = 0;
  std::size_t hit = 0;
  for (const auto& e : entries) {
    if (e.class_id != class_id) continue;
    ++n;
    if (e.saturated_high) ++hit;
  }
  return n == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(n);
}

double SensitivityResult::saturated_high_fraction() const {
  if (entries.empty()) return 0.0;
  const auto hit = std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.saturated_high; });
  return static_cast<double>(hit) / static_cast<double>(entries.size());
}

SensitivityResult sensitivity_analysis(const MlpModel& model, const FeatureDataset& dataset) {
  if (model.mode != dataset.mode()) throw ModeMismatchError("model and dataset feature modes differ");
  SensitivityResult result;
  for (int c = 1; c <= model.n_out(); ++c) {
    const FeatureDataset cls = dataset.filter_class(c);
    if (cls.empty()) throw CoverageError("class " + std::to_string(c) + " has no rows for the sensitivity scan");
    const std::vector<double> mean = cls.column_means();
    for (std::size_t p = 0; p < mean.size(); ++p) result.entries.push_back(sensitivity_scan(model, mean, c, p));
  }
  return result;
}

// --- ReliefF ----------------------------------------------------------------

ReliefFResult relieff(const FeatureDataset& dataset, int k_neighbors, int jobs) {
  if (k_neighbors < 1) throw ParameterError("ReliefF needs K >= 1");
  const std::size_t m = dataset.size();
  const std::size_t a = dataset.width();
  const auto counts = dataset.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] != 0 && counts[c] < static_cast<std::size_t>(k_neighbors) + 1)
      throw ParameterError("class " + std::to_string(c + 1) + " has fewer than K+1 instances");
  }

  // Range-normalized copy; constant columns become all-zero.
  std::vector<double> x(dataset.values());
  for (std::size_t j = 0; j < a; ++j) {
    double lo = x[j];
    double hi = x[j];
    for (std::size_t i = 0; i < m; ++i) {
      lo = std::min(lo, x[i * a + j]);
      hi = std::max(hi, x[i * a + j]);
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < m; ++i) x[i * a + j] = range > 0.0 ? (x[i * a + j] - lo) / range : 0.0;
  }

  std::vector<double> prior(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) prior[c] = static_cast<double>(counts[c]) / static_cast<double>(m);

  const auto k = static_cast<std::size_t>(k_neighbors);
  std::vector<double> contrib(m * a, 0.0);
  detail::parallel_for(m, jobs, [&](std::size_t r) {
    const double* xr = &x[r * a];
    std::vector<double> dist(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double* xi = &x[i * a];
      double d = 0.0;
      for (std::size_t j = 0; j < a; ++j) d += std::abs(xr[j] - xi[j]);
      dist[i] = d;
    }
    const auto own = static_cast<std::size_t>(dataset.label(r) - 1);
    double* out = &contrib[r * a];
    std::vector<std::size_t> pool;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) continue;
      pool.clear();
      for (std::size_t i = 0; i < m; ++i) {
        if (i != r && static_cast<std::size_t>(dataset.label(i) - 1) == c) pool.push_back(i);
      }
      const std::size_t take = std::min(k, pool.size());
      std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(),
                        [&](std::size_t p, std::size_t q) { return dist[p] < dist[q] || (dist[p] == dist[q] && p < q); });
      const double w = c == own ? -1.0 : prior[c] / (1.0 - prior[own]);
      for (std::size_t j = 0; j < a; ++j) {
        double s = 0.0;
        for (std::size_t n = 0; n < take; ++n) s += std::abs(xr[j] - x[pool[n] * a + j]);
        out[j] += w * s;
      }
    }
  });

  ReliefFResult result;
  result.k_neighbors = k_neighbors;
  result.m = m;
  result.weights.assign(a, 0.0);
  const double norm = static_cast<double>(m) * static_cast<double>(k);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t j = 0; j < a; ++j) result.weights[j] += contrib[r * a + j];
  for (auto& w : result.weights) w /= norm;
  return result;
}

double relieff_threshold(double alpha, double m) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  if (!(m >= 1.0)) throw ParameterError("m must be at least 1");
  return 1.0 / std::sqrt(alpha * m);
}

double relieff_alpha_for(double tau, double m) {
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  if (!(m >= 1.0)) throw ParameterError("m must be at least 1");
  return 1.0 / (tau * tau * m);
}

}  // namespace essc
