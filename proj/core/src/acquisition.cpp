#include "essc/acquisition.hpp"

#include <cmath>
#include <string>

#include "essc/error.hpp"

namespace essc {

double NoiseSpec::noise_fraction() const {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::pow(10.0, -snr_db / 20.0);
}

double NoiseSpec::snr_from_fraction(double fraction) {
  if (!(fraction > 0.0)) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(fraction);
}

void NoiseSpec::validate() const {
  if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0)) throw ParameterError("snr_db must be finite or +inf");
  if (!(scale_max >= 0.0 && scale_max < 1.0)) throw ParameterError("scale_max must lie in [0, 1)");
  if (!(offset_max >= 0.0 && offset_max < 1.0)) throw ParameterError("offset_max must lie in [0, 1)");
  if (decimation <= 0) throw ParameterError("decimation factor must be positive");
  if (jitter_max < 0 || jitter_max >= decimation) throw ParameterError("jitter_max must lie in [0, decimation)");
}

SampledSignal decimate_with_jitter(const SampledSignal& signal, const NoiseSpec& spec, RngStream& rng) {
  if (spec.decimation <= 0) throw ParameterError("decimation factor must be positive");
  if (spec.jitter_max < 0 || spec.jitter_max >= spec.decimation)
    throw ParameterError("jitter_max must lie in [0, decimation)");
  const auto m = static_cast<std::size_t>(spec.decimation);
  const auto jmax = static_cast<std::size_t>(spec.jitter_max);
  const auto in = signal.samples();
  if (in.size() <= jmax) throw ParameterError("signal shorter than the jitter range");
  // Every output index i*M + j stays inside the input for any j <= jitter_max.
  const std::size_t count = (in.size() - 1 - jmax) / m + 1;

  std::vector<double> out(count);
  if (spec.jitter_mode == JitterMode::PerAcquisition) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, spec.jitter_max));
    for (std::size_t i = 0; i < count; ++i) out[i] = in[i * m + j];
    return SampledSignal(std::move(out), signal.dt() * static_cast<double>(m),
                         signal.t0() + static_cast<double>(j) * signal.dt());
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, spec.jitter_max));
    out[i] = in[i * m + j];
  }
  return SampledSignal(std::move(out), signal.dt() * static_cast<double>(m), signal.t0());
}

SampledSignal random_scale(const SampledSignal& signal, const NoiseSpec& spec, RngStream& rng) {
  const double s = rng.uniform(1.0 - spec.scale_max, 1.0);
  if (spec.scale_max == 0.0) return signal;
  std::vector<double> out(signal.samples().begin(), signal.samples().end());
  for (double& v : out) v *= s;
  return signal.with_samples(std::move(out));
}

SampledSignal random_offset(const SampledSignal& signal, const NoiseSpec& spec, RngStream& rng) {
  const double u = rng.uniform(-1.0, 1.0);
  if (spec.offset_max == 0.0) return signal;
  const double b = u * spec.offset_max * signal.max_abs();
  std::vector<double> out(signal.samples().begin(), signal.samples().end());
  for (double& v : out) v += b;
  return signal.with_samples(std::move(out));
}

SampledSignal add_awgn(const SampledSignal& signal, const NoiseSpec& spec, RngStream& rng) {
  const double peak = signal.max_abs();
  if (peak == 0.0) throw UndefinedSnrError("SNR is undefined for an all-zero signal");
  const double sigma = peak * spec.noise_fraction();
  if (sigma == 0.0) return signal;
  std::vector<double> out(signal.samples().begin(), signal.samples().end());
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : out) v += noise(rng.engine());
  return signal.with_samples(std::move(out));
}

SampledSignal simulate_acquisition(const SampledSignal& ideal,
                                   const FilterSpec& filter,
                                   const NoiseSpec& spec,
                                   RngStream& rng,
                                   std::vector<std::string>* trace) {
  spec.validate();
  filter.validate();
  // One child stream per stage: switching a stage off never shifts the others.
  RngStream jitter_rng = rng.split(1);
  RngStream scale_rng = rng.split(2);
  RngStream offset_rng = rng.split(3);
  RngStream noise_rng = rng.split(4);
  auto log = [trace](const char* stage) {
    if (trace) trace->emplace_back(stage);
  };

  SampledSignal s = ideal;
  if (spec.filter_stage == FilterStage::BeforeDecimation) {
    s = apply_deformation(s, filter);
    log("deformation_filter");
    s = decimate_with_jitter(s, spec, jitter_rng);
    log("downsampling_jitter");
  } else {
    s = decimate_with_jitter(s, spec, jitter_rng);
    log("downsampling_jitter");
    s = apply_deformation(s, filter);
    log("deformation_filter");
  }
  s = random_scale(s, spec, scale_rng);
  log("random_scaling");
  s = random_offset(s, spec, offset_rng);
  log("offset_noise");
  s = add_awgn(s, spec, noise_rng);
  log("gaussian_white_noise");
  return s;
}

}  // namespace essc
