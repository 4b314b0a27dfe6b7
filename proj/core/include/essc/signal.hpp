#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace essc {

/// Uniformly sampled real waveform. Sample n sits at t0 + n * dt.
class SampledSignal {
 public:
  SampledSignal(std::vector<double> samples, double dt, double t0 = 0.0);

  std::span<const double> samples() const { return samples_; }
  std::vector<double>& mutable_samples() { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double dt() const { return dt_; }
  double t0() const { return t0_; }
  double time(std::size_t n) const { return t0_ + static_cast<double>(n) * dt_; }
  double operator[](std::size_t n) const { return samples_[n]; }

  double max_abs() const;
  /// Time span covered by the samples, (N - 1) * dt.
  double span() const;

  SampledSignal with_samples(std::vector<double> samples) const;

  friend bool operator==(const SampledSignal&, const SampledSignal&) = default;

 private:
  std::vector<double> samples_;
  double dt_;
  double t0_;
};

enum class PulseFamily { Sinc, Gaussian, Chirp };
enum class ChirpEnvelope { RaisedCosine, Constant };

std::string_view to_string(PulseFamily family);
PulseFamily parse_pulse_family(std::string_view name);

struct PulseSpec {
  PulseFamily family = PulseFamily::Sinc;
  double duration = 1.0;
  std::size_t resolution = 10000;
  double center = 0.5;  // fraction of duration
  // Sinc: sinc(2*pi*B*(t - center)), spectrum flat up to B.
  double sinc_bandwidth = 4.0;
  // Gaussian: exp(-(t - center)^2 / (2 sigma_t^2)).
  double gauss_sigma_t = 0.05;
  // Chirp: w(t) sin(2 pi (nu_lo t + (nu_hi - nu_lo) t^2 / (2 T))).
  double chirp_nu_lo = 2.0;
  double chirp_nu_hi = 8.0;
  ChirpEnvelope chirp_envelope = ChirpEnvelope::RaisedCosine;

  void validate() const;
  friend bool operator==(const PulseSpec&, const PulseSpec&) = default;
};

/// Ideal pulse of `resolution` samples over [0, duration), peak |f| = 1.
SampledSignal generate_pulse(const PulseSpec& spec);

/// f_D[n] = f[n+1] - f[n], last element 0.
SampledSignal derivative(const SampledSignal& signal);

/// f_I[n] = f_I[n-1] + f[n] with a zero seed before index 0.
SampledSignal integral(const SampledSignal& signal);

// Serialization. CSV has a `time,amplitude` header; the binary form starts
// with the 8-byte magic "ESSCSIG" '\0' and a u32 format version.
void write_signal_csv(std::ostream& out, const SampledSignal& signal);
SampledSignal read_signal_csv(std::istream& in);
void write_signal_binary(std::ostream& out, const SampledSignal& signal);
SampledSignal read_signal_binary(std::istream& in);

void save_signal(const std::filesystem::path& path, const SampledSignal& signal);
SampledSignal load_signal(const std::filesystem::path& path);

}  // namespace essc
