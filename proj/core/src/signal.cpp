#include "essc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "essc/error.hpp"

namespace essc {

SampledSignal::SampledSignal(std::vector<double> samples, double dt, double t0)
    : samples_(std::move(samples)), dt_(dt), t0_(t0) {
  if (samples_.empty()) throw ParameterError("signal must contain at least one sample");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ParameterError("sample period must be positive");
  if (!std::isfinite(t0_)) throw ParameterError("start time must be finite");
  for (double v : samples_) {
    if (!std::isfinite(v)) throw ParameterError("signal contains a non-finite sample");
  }
}

double SampledSignal::max_abs() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

double SampledSignal::span() const { return static_cast<double>(samples_.size() - 1) * dt_; }

SampledSignal SampledSignal::with_samples(std::vector<double> samples) const {
  return SampledSignal(std::move(samples), dt_, t0_);
}

std::string_view to_string(PulseFamily family) {
  switch (family) {
    case PulseFamily::Sinc: return "sinc";
    case PulseFamily::Gaussian: return "gaussian";
    case PulseFamily::Chirp: return "chirp";
  }
  return "unknown";
}

PulseFamily parse_pulse_family(std::string_view name) {
  if (name == "sinc") return PulseFamily::Sinc;
  if (name == "gaussian") return PulseFamily::Gaussian;
  if (name == "chirp") return PulseFamily::Chirp;
  throw ParameterError("unknown pulse family '" + std::string(name) + "'");
}

void PulseSpec::validate() const {
  if (resolution < 100) throw ParameterError("pulse resolution must be >= 100");
  if (!(duration > 0.0)) throw ParameterError("pulse duration must be positive");
  if (!(center >= 0.0 && center <= 1.0)) throw ParameterError("pulse center must lie in [0, 1]");
  switch (family) {
    case PulseFamily::Sinc:
      if (!(sinc_bandwidth > 0.0)) throw ParameterError("sinc bandwidth must be positive");
      break;
    case PulseFamily::Gaussian:
      if (!(gauss_sigma_t > 0.0)) throw ParameterError("gaussian sigma_t must be positive");
      break;
    case PulseFamily::Chirp:
      if (!(chirp_nu_lo > 0.0) || !(chirp_nu_hi > 0.0))
        throw ParameterError("chirp frequencies must be positive");
      break;
  }
}

SampledSignal generate_pulse(const PulseSpec& spec) {
  spec.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t n = spec.resolution;
  const double dt = spec.duration / static_cast<double>(n);
  const double tc = spec.center * spec.duration;

  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    switch (spec.family) {
      case PulseFamily::Sinc: {
        const double x = two_pi * spec.sinc_bandwidth * (t - tc);
        f[i] = x == 0.0 ? 1.0 : std::sin(x) / x;
        break;
      }
      case PulseFamily::Gaussian: {
        const double u = (t - tc) / spec.gauss_sigma_t;
        f[i] = std::exp(-0.5 * u * u);
        break;
      }
      case PulseFamily::Chirp: {
        const double sweep = (spec.chirp_nu_hi - spec.chirp_nu_lo) / spec.duration;
        const double phase = two_pi * (spec.chirp_nu_lo * t + 0.5 * sweep * t * t);
        const double envelope = spec.chirp_envelope == ChirpEnvelope::Constant
                                    ? 1.0
                                    : 0.5 * (1.0 - std::cos(two_pi * t / spec.duration));
        f[i] = envelope * std::sin(phase);
        break;
      }
    }
  }

  double peak = 0.0;
  for (double v : f) peak = std::max(peak, std::abs(v));
  for (double& v : f) v /= peak;
  return SampledSignal(std::move(f), dt, 0.0);
}

SampledSignal derivative(const SampledSignal& signal) {
  const auto f = signal.samples();
  std::vector<double> d(f.size(), 0.0);
  for (std::size_t n = 0; n + 1 < f.size(); ++n) d[n] = f[n + 1] - f[n];
  return signal.with_samples(std::move(d));
}

SampledSignal integral(const SampledSignal& signal) {
  const auto f = signal.samples();
  std::vector<double> acc(f.size());
  double running = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    running += f[n];
    acc[n] = running;
  }
  return signal.with_samples(std::move(acc));
}

}  // namespace essc
