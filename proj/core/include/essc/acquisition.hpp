#pragma once

#include <limits>
#include <string>
#include <vector>

#include "essc/rng.hpp"
#include "essc/signal.hpp"
#include "essc/spectral.hpp"

namespace essc {

enum class JitterMode { PerAcquisition, PerSample };

/// Where the deformation filter sits relative to decimation.
enum class FilterStage { AfterDecimation, BeforeDecimation };

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();  // +inf disables noise
  double scale_max = 0.75;
  double offset_max = 0.05;
  int jitter_max = 9;
  int decimation = 10;
  JitterMode jitter_mode = JitterMode::PerAcquisition;
  FilterStage filter_stage = FilterStage::AfterDecimation;

  /// Noise standard deviation relative to max|f|.
  double noise_fraction() const;
  static double snr_from_fraction(double fraction);

  void validate() const;
};

/// Output sample i is input sample i*M + j, with one jitter draw j per call
/// (or one per sample in PerSample mode).
SampledSignal decimate_with_jitter(const SampledSignal& signal, const NoiseSpec& spec, RngStream& rng);

SampledSignal random_scale(const SampledSignal& signal, const NoiseSpec& spec, RngStream& rng);
SampledSignal random_offset(const SampledSignal& signal, const NoiseSpec& spec, RngStream& rng);
SampledSignal add_awgn(const SampledSignal& signal, const NoiseSpec& spec, RngStream& rng);

/// Full chain producing the "real input signal". Stage names are appended to
/// `trace` in execution order when it is non-null.
SampledSignal simulate_acquisition(const SampledSignal& ideal,
                                   const FilterSpec& filter,
                                   const NoiseSpec& spec,
                                   RngStream& rng,
                                   std::vector<std::string>* trace = nullptr);

}  // namespace essc
