#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "essc/filters.hpp"
#include "essc/signal.hpp"

namespace essc {

enum class ExtremumKind { Min, Max };

/// Local extrema of a signal, endpoints included, alternating min/max.
struct ExtremaSequence {
  std::vector<std::size_t> indices;
  std::vector<double> values;
  std::vector<ExtremumKind> kinds;

  std::size_t size() const { return indices.size(); }
};

ExtremaSequence detect_extrema(const SampledSignal& signal);

/// Amplitude/duration pairs (A_m, T_m) between consecutive extrema.
struct SegmentSet {
  std::vector<double> amplitudes;
  std::vector<double> durations;

  std::size_t count() const { return amplitudes.size(); }
};

SegmentSet segments_from_extrema(const SampledSignal& signal, const ExtremaSequence& extrema);

struct SscParams {
  double m_a = 0.0;
  double m_t = 0.0;
  double d_a = 0.0;
  double d_t = 0.0;
};

/// The four SSC parameters: means and mean absolute deviations of A_m, T_m.
SscParams ssc_params(const SegmentSet& segments);

enum class TimeWeight {
  Signed,    // g = f / sum|f|
  Absolute,  // g = |f| / sum|f|
};

struct TimeCumulants {
  double zeroth = 0.0;  // <t^0> = sum g, diagnostic only
  double mean = 0.0;    // c1
  double c2 = 0.0;
  double c3 = 0.0;
};

/// First three cumulants of t under the weight g, assembled from the raw
/// moments <t>, <t^2>, <t^3> accumulated in one pass.
TimeCumulants time_cumulants(const SampledSignal& signal, TimeWeight weight = TimeWeight::Signed);

struct AmplitudeMoments {
  double mean = 0.0;
  double variance = 0.0;
  double third = 0.0;
};

/// Mean and 2nd/3rd central moments of the sample amplitudes (1/N weighting).
AmplitudeMoments amplitude_moments(const SampledSignal& signal);

enum class FeatureMode { Essc30, Ssc4 };

std::string_view to_string(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view name);
std::size_t feature_count(FeatureMode mode);

inline constexpr std::size_t kParamsPerSource = 10;
inline constexpr std::size_t kSourceCount = 3;
inline constexpr std::size_t kEsscFeatureCount = kParamsPerSource * kSourceCount;
inline constexpr std::size_t kSscFeatureCount = 4;

/// Parameter order within one source block.
inline constexpr std::array<std::string_view, kParamsPerSource> kParamNames = {
    "MT", "DT", "MA", "DA", "Mf1", "Df2", "Df3", "Mt1", "Dt2", "Dt3"};
inline constexpr std::array<std::string_view, kSourceCount> kSourceNames = {"sig", "der", "int"};

/// Column names, e.g. "sig_MT" ... "int_Dt3".
std::vector<std::string> feature_names(FeatureMode mode);

/// The ten parameters of one signal in block order.
std::array<double, kParamsPerSource> parameter_block(const SampledSignal& normalized,
                                                     TimeWeight weight = TimeWeight::Signed);

struct EsscFeatures {
  std::vector<double> values;
  FeatureMode mode = FeatureMode::Essc30;

  std::size_t size() const { return values.size(); }
  /// ESSC30 -> SSC4 projection (first four signal-branch values).
  EsscFeatures project(FeatureMode target) const;
};

struct FeatureConfig {
  std::size_t median_window = 41;
  std::size_t mean_window = 101;
  std::size_t edge_window = 100;
  double threshold_frac = 0.03;
  std::size_t derivative_median_window = 21;
  TimeWeight time_weight = TimeWeight::Signed;
};

/// Intermediate signals of the extraction pipeline, for inspection and plots.
struct ExtractionTrace {
  SampledSignal normalized{{0.0}, 1.0};
  SampledSignal normalized_derivative{{0.0}, 1.0};
  SampledSignal normalized_integral{{0.0}, 1.0};
};

EsscFeatures extract_features(const SampledSignal& raw,
                              FeatureMode mode,
                              const FeatureConfig& config = {},
                              ExtractionTrace* trace = nullptr);

}  // namespace essc
