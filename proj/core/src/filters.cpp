#include "essc/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "essc/error.hpp"

namespace essc {
namespace {

void check_window(std::size_t window, std::size_t length, const char* what) {
  if (window < 1) throw ParameterError(std::string(what) + " window must be >= 1");
  if (window > length)
    throw ParameterError(std::string(what) + " window " + std::to_string(window) + " exceeds signal length " +
                         std::to_string(length));
}

}  // namespace

SampledSignal median_filter(const SampledSignal& signal, std::size_t window) {
  const auto f = signal.samples();
  const std::size_t n = f.size();
  check_window(window, n, "median");
  if (window == 1) return signal;
  const std::size_t half = window / 2;

  std::vector<double> out(n);
  std::vector<double> buf;
  buf.reserve(window);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    buf.assign(f.begin() + static_cast<std::ptrdiff_t>(lo), f.begin() + static_cast<std::ptrdiff_t>(hi + 1));
    const std::size_t mid = buf.size() / 2;
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
    double m = buf[mid];
    if (buf.size() % 2 == 0) {
      const double lower = *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
      m = 0.5 * (lower + m);
    }
    out[i] = m;
  }
  return signal.with_samples(std::move(out));
}

SampledSignal mean_filter(const SampledSignal& signal, std::size_t window) {
  const auto f = signal.samples();
  const std::size_t n = f.size();
  check_window(window, n, "mean");
  if (window == 1) return signal;
  const std::size_t half = window / 2;

  std::vector<long double> prefix(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + f[i];

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    out[i] = static_cast<double>((prefix[hi + 1] - prefix[lo]) / static_cast<long double>(hi - lo + 1));
  }
  return signal.with_samples(std::move(out));
}

SampledSignal offset_correction(const SampledSignal& signal, std::size_t edge_window) {
  const auto f = signal.samples();
  const std::size_t n = f.size();
  if (edge_window < 1) throw ParameterError("offset-correction window must be >= 1");
  if (2 * edge_window > n) throw ParameterError("offset-correction windows overlap: 2*" + std::to_string(edge_window) +
                                                " > " + std::to_string(n));
  long double sum = 0.0L;
  for (std::size_t i = 0; i < edge_window; ++i) sum += f[i] + f[n - 1 - i];
  const double level = static_cast<double>(sum / static_cast<long double>(2 * edge_window));

  std::vector<double> out(f.begin(), f.end());
  for (double& v : out) v -= level;
  return signal.with_samples(std::move(out));
}

SampledSignal detect_and_normalize(const SampledSignal& signal, double threshold_frac) {
  if (!(threshold_frac > 0.0 && threshold_frac <= 1.0))
    throw ParameterError("pulse-detection threshold must lie in (0, 1]");
  const auto f = signal.samples();
  const double peak = signal.max_abs();
  if (peak == 0.0) throw NoPulseDetectedError("no sample exceeds the detection threshold (signal is zero)");
  const double level = threshold_frac * peak;

  std::size_t first = 0;
  while (first < f.size() && std::abs(f[first]) < level) ++first;
  std::size_t last = f.size() - 1;
  while (last > first && std::abs(f[last]) < level) --last;
  if (first == f.size()) throw NoPulseDetectedError("no sample exceeds the detection threshold");

  const std::size_t len = last - first + 1;
  std::vector<double> out(len);
  for (std::size_t i = 0; i < len; ++i) out[i] = f[first + i] / peak;
  const double dt = len > 1 ? 1.0 / static_cast<double>(len - 1) : 1.0;
  return SampledSignal(std::move(out), dt, 0.0);
}

SampledSignal normalize_amplitude(const SampledSignal& signal) {
  const double peak = signal.max_abs();
  if (peak == 0.0) return signal;
  std::vector<double> out(signal.samples().begin(), signal.samples().end());
  for (double& v : out) v /= peak;
  return signal.with_samples(std::move(out));
}

}  // namespace essc
