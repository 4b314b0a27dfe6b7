#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "essc/dataset.hpp"
#include "essc/mlp.hpp"
#include "essc/rng.hpp"

namespace essc {

/// counts[target - 1][output - 1].
struct ConfusionMatrix {
  std::array<std::array<long, kClassCount>, kClassCount> counts{};
  double snr_db = 0.0;
  FeatureMode mode = FeatureMode::Essc30;

  long row_sum(int target) const;
  long total() const;
  double accuracy() const;
  /// counts(a,b) + counts(b,a) for a != b.
  long pair_confusion(int a, int b) const;
};

/// Maps (features, target class, rng) to an output class id in 1..5.
using Classifier = std::function<int(std::span<const double>, int, RngStream&)>;

ConfusionMatrix evaluate_confusion(const FeatureDataset& test, const Classifier& classifier, const RngStream& rng);
ConfusionMatrix evaluate_confusion(const MlpModel& model, const FeatureDataset& test, const RngStream& rng,
                                   DecisionRule rule = DecisionRule::WeightedRandom);

// --- sensitivity -----------------------------------------------------------

inline constexpr int kSensitivitySteps = 30;
inline constexpr double kSensitivityThreshold = 0.9;
inline constexpr double kSensitivityMin = 0.1;
inline constexpr double kSensitivityMax = 100.0;

/// Exponential ramp from 0.01 (n = 1) to 10 (n = 30).
double sensitivity_rate();
double sensitivity_amplitude();
double sensitivity_step(int n);

/// Amplitude-comparability divisor of a parameter position within its block
/// (2 for M_A/D_A, 2^q for D_f^q, 1 otherwise).
double comparability_divisor(std::size_t feature_index);

struct SensitivityEntry {
  int class_id = 0;
  std::size_t feature_index = 0;
  double s_p = kSensitivityMin;
  double delta_90 = 0.0;      // 0 when the class mean already scores below 0.9
  int crossing_step = 0;      // 0: immediate, -1: never crossed
  double base_probability = 0.0;
  bool saturated_high = false;
  bool saturated_low = false;
};

SensitivityEntry sensitivity_scan(const MlpModel& model, std::span<const double> class_mean,
                                  int target_class, std::size_t feature_index);

struct SensitivityResult {
  std::vector<SensitivityEntry> entries;  // class-major, feature order

  double saturated_high_fraction(int class_id) const;
  double saturated_high_fraction() const;
};

SensitivityResult sensitivity_analysis(const MlpModel& model, const FeatureDataset& dataset);

// --- ReliefF ----------------------------------------------------------------

struct ReliefFResult {
  std::vector<double> weights;
  int k_neighbors = 10;
  std::size_t m = 0;
};

/// Multiclass ReliefF (Kononenko): every instance is used once, K nearest hits
/// and K nearest misses per other class, Manhattan distance on range-normalized
/// features, miss terms weighted by P(C) / (1 - P(class)). Ties break on index.
ReliefFResult relieff(const FeatureDataset& dataset, int k_neighbors = 10, int jobs = 1);

/// Chebyshev relevance threshold 1 / sqrt(alpha m).
double relieff_threshold(double alpha, double m);
/// Confidence level at which `tau` would be the threshold.
double relieff_alpha_for(double tau, double m);

}  // namespace essc
