#include "essc/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "essc/error.hpp"

namespace essc {

// --- extrema and segments ----------------------------------------------------

ExtremaSequence detect_extrema(const SampledSignal& signal) {
  const auto f = signal.samples();
  const std::size_t n = f.size();
  ExtremaSequence interior;

  int prev_sign = 0;
  std::size_t plateau_start = 0;
  bool in_plateau = false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = f[i + 1] - f[i];
    const int s = (d > 0.0) - (d < 0.0);
    if (s == 0) {
      if (!in_plateau) {
        plateau_start = i;
        in_plateau = true;
      }
      continue;
    }
    if (prev_sign != 0 && s != prev_sign) {
      const std::size_t at = in_plateau ? (plateau_start + i) / 2 : i;
      const auto kind = prev_sign > 0 ? ExtremumKind::Max : ExtremumKind::Min;
      // Sign-change detection alternates by construction; keep the more extreme
      // of two same-kind neighbours anyway.
      if (!interior.kinds.empty() && interior.kinds.back() == kind) {
        const bool replace = kind == ExtremumKind::Max ? f[at] > interior.values.back() : f[at] < interior.values.back();
        if (replace) {
          interior.indices.back() = at;
          interior.values.back() = f[at];
        }
      } else {
        interior.indices.push_back(at);
        interior.values.push_back(f[at]);
        interior.kinds.push_back(kind);
      }
    }
    prev_sign = s;
    in_plateau = false;
  }

  auto opposite = [](ExtremumKind k) { return k == ExtremumKind::Max ? ExtremumKind::Min : ExtremumKind::Max; };

  ExtremaSequence out;
  out.indices.reserve(interior.size() + 2);
  out.values.reserve(interior.size() + 2);
  out.kinds.reserve(interior.size() + 2);

  ExtremumKind first_kind;
  if (interior.kinds.empty())
    first_kind = f[0] <= f[n - 1] ? ExtremumKind::Min : ExtremumKind::Max;
  else
    first_kind = opposite(interior.kinds.front());
  out.indices.push_back(0);
  out.values.push_back(f[0]);
  out.kinds.push_back(first_kind);
  if (n == 1) return out;

  for (std::size_t k = 0; k < interior.size(); ++k) {
    out.indices.push_back(interior.indices[k]);
    out.values.push_back(interior.values[k]);
    out.kinds.push_back(interior.kinds[k]);
  }
  out.indices.push_back(n - 1);
  out.values.push_back(f[n - 1]);
  out.kinds.push_back(opposite(out.kinds.back()));
  return out;
}

SegmentSet segments_from_extrema(const SampledSignal& signal, const ExtremaSequence& extrema) {
  SegmentSet seg;
  if (extrema.size() < 2) return seg;
  seg.amplitudes.reserve(extrema.size() - 1);
  seg.durations.reserve(extrema.size() - 1);
  for (std::size_t m = 1; m < extrema.size(); ++m) {
    seg.amplitudes.push_back(std::abs(extrema.values[m] - extrema.values[m - 1]));
    seg.durations.push_back(static_cast<double>(extrema.indices[m] - extrema.indices[m - 1]) * signal.dt());
  }
  return seg;
}

SscParams ssc_params(const SegmentSet& segments) {
  const std::size_t count = segments.count();
  if (count == 0) throw ParameterError("SSC parameters need at least one segment");
  if (segments.durations.size() != count) throw ShapeError("segment amplitude/duration counts differ");
  const double nm = static_cast<double>(count);

  SscParams p;
  for (std::size_t m = 0; m < count; ++m) {
    p.m_a += segments.amplitudes[m];
    p.m_t += segments.durations[m];
  }
  p.m_a /= nm;
  p.m_t /= nm;
  for (std::size_t m = 0; m < count; ++m) {
    p.d_a += std::abs(segments.amplitudes[m] - p.m_a);
    p.d_t += std::abs(segments.durations[m] - p.m_t);
  }
  p.d_a /= nm;
  p.d_t /= nm;
  return p;
}

// --- moments -------------------------------------------------------------------

TimeCumulants time_cumulants(const SampledSignal& signal, TimeWeight weight) {
  const auto f = signal.samples();
  long double norm = 0.0L;
  long double m0 = 0.0L;
  long double m1 = 0.0L;
  long double m2 = 0.0L;
  long double m3 = 0.0L;
  for (std::size_t n = 0; n < f.size(); ++n) {
    const long double t = signal.time(n);
    const long double w = weight == TimeWeight::Signed ? f[n] : std::abs(f[n]);
    norm += std::abs(f[n]);
    m0 += w;
    m1 += w * t;
    m2 += w * t * t;
    m3 += w * t * t * t;
  }
  if (norm == 0.0L) throw ParameterError("time moments are undefined for an all-zero signal");
  m0 /= norm;
  m1 /= norm;
  m2 /= norm;
  m3 /= norm;

  TimeCumulants c;
  c.zeroth = static_cast<double>(m0);
  c.mean = static_cast<double>(m1);
  c.c2 = static_cast<double>(m2 - m1 * m1);
  c.c3 = static_cast<double>(m3 - 3.0L * m1 * m2 + 2.0L * m1 * m1 * m1);
  return c;
}

AmplitudeMoments amplitude_moments(const SampledSignal& signal) {
  const auto f = signal.samples();
  const auto n = static_cast<long double>(f.size());
  long double sum = 0.0L;
  for (double v : f) sum += v;
  const long double mean = sum / n;
  long double s2 = 0.0L;
  long double s3 = 0.0L;
  for (double v : f) {
    const long double d = v - mean;
    s2 += d * d;
    s3 += d * d * d;
  }
  return {static_cast<double>(mean), static_cast<double>(s2 / n), static_cast<double>(s3 / n)};
}

// --- feature vectors -------------------------------------------------------------

std::string_view to_string(FeatureMode mode) { return mode == FeatureMode::Essc30 ? "essc" : "ssc"; }

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "essc" || name == "essc30") return FeatureMode::Essc30;
  if (name == "ssc" || name == "ssc4") return FeatureMode::Ssc4;
  throw ParameterError("unknown feature mode '" + std::string(name) + "'");
}

std::size_t feature_count(FeatureMode mode) { return mode == FeatureMode::Essc30 ? kEsscFeatureCount : kSscFeatureCount; }

std::vector<std::string> feature_names(FeatureMode mode) {
  std::vector<std::string> names;
  const std::size_t sources = mode == FeatureMode::Essc30 ? kSourceCount : 1;
  const std::size_t params = mode == FeatureMode::Essc30 ? kParamsPerSource : kSscFeatureCount;
  for (std::size_t s = 0; s < sources; ++s) {
    for (std::size_t p = 0; p < params; ++p) {
      names.push_back(std::string(kSourceNames[s]) + "_" + std::string(kParamNames[p]));
    }
  }
  return names;
}

std::array<double, kParamsPerSource> parameter_block(const SampledSignal& normalized, TimeWeight weight) {
  const auto ssc = ssc_params(segments_from_extrema(normalized, detect_extrema(normalized)));
  const auto amp = amplitude_moments(normalized);
  const auto tc = time_cumulants(normalized, weight);
  return {ssc.m_t, ssc.d_t, ssc.m_a, ssc.d_a, amp.mean, amp.variance, amp.third, tc.mean, tc.c2, tc.c3};
}

EsscFeatures EsscFeatures::project(FeatureMode target) const {
  if (target == mode) return *this;
  if (target == FeatureMode::Essc30) throw ModeMismatchError("cannot expand SSC4 features to ESSC30");
  EsscFeatures out;
  out.mode = FeatureMode::Ssc4;
  out.values.assign(values.begin(), values.begin() + kSscFeatureCount);
  return out;
}

namespace {

std::size_t fit_window(std::size_t window, std::size_t length) {
  std::size_t w = std::min(window, length);
  if (w % 2 == 0 && w > 1) --w;
  return std::max<std::size_t>(w, 1);
}

}  // namespace

EsscFeatures extract_features(const SampledSignal& raw, FeatureMode mode, const FeatureConfig& config,
                              ExtractionTrace* trace) {
  const std::size_t n = raw.size();
  SampledSignal s = median_filter(raw, fit_window(config.median_window, n));
  s = mean_filter(s, fit_window(config.mean_window, n));
  s = offset_correction(s, std::max<std::size_t>(1, std::min(config.edge_window, n / 2)));
  const SampledSignal sig = detect_and_normalize(s, config.threshold_frac);

  EsscFeatures out;
  out.mode = mode;
  const auto sig_block = parameter_block(sig, config.time_weight);
  if (mode == FeatureMode::Ssc4) {
    out.values.assign(sig_block.begin(), sig_block.begin() + kSscFeatureCount);
    if (trace) trace->normalized = sig;
    return out;
  }

  SampledSignal der = derivative(sig);
  der = median_filter(der, fit_window(config.derivative_median_window, der.size()));
  if (der.max_abs() == 0.0) throw NoPulseDetectedError("derivative of the detected pulse vanishes");
  der = normalize_amplitude(der);

  SampledSignal integ = normalize_amplitude(integral(sig));
  if (integ.max_abs() == 0.0) throw NoPulseDetectedError("integral of the detected pulse vanishes");

  const auto der_block = parameter_block(der, config.time_weight);
  const auto int_block = parameter_block(integ, config.time_weight);
  out.values.reserve(kEsscFeatureCount);
  out.values.insert(out.values.end(), sig_block.begin(), sig_block.end());
  out.values.insert(out.values.end(), der_block.begin(), der_block.end());
  out.values.insert(out.values.end(), int_block.begin(), int_block.end());

  if (trace) {
    trace->normalized = sig;
    trace->normalized_derivative = der;
    trace->normalized_integral = integ;
  }
  return out;
}

}  // namespace essc
