#include "essc/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <fftw3.h>

#include "essc/error.hpp"

namespace essc {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per (size, direction) and kept for the process.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, bool inverse) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, inverse);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

double gaussian_pair(double nu, double nu_c, double sigma_nu) {
  const double s2 = 2.0 * sigma_nu * sigma_nu;
  return std::exp(-(nu + nu_c) * (nu + nu_c) / s2) + std::exp(-(nu - nu_c) * (nu - nu_c) / s2);
}

// max over nu of the (even) two-Gaussian profile. Unimodal with the peak at 0
// when nu_c <= sigma_nu, otherwise the peak lies in (0, nu_c].
double gaussian_pair_peak(double nu_c, double sigma_nu) {
  const double c = std::abs(nu_c);
  double best = gaussian_pair(0.0, c, sigma_nu);
  if (c <= sigma_nu) return best;
  constexpr double inv_phi = 0.6180339887498948482;
  double a = 0.0;
  double b = c;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = gaussian_pair(x1, c, sigma_nu);
  double f2 = gaussian_pair(x2, c, sigma_nu);
  for (int iter = 0; iter < 200 && (b - a) > 1e-15 * (1.0 + c); ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = gaussian_pair(x2, c, sigma_nu);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = gaussian_pair(x1, c, sigma_nu);
    }
  }
  return std::max({best, f1, f2, gaussian_pair(0.5 * (a + b), c, sigma_nu)});
}

}  // namespace

double Spectrum::frequency(std::size_t k) const {
  const auto n = static_cast<long long>(bins.size());
  const auto kk = static_cast<long long>(k);
  const long long signed_k = kk < (n + 1) / 2 ? kk : kk - n;
  return static_cast<double>(signed_k) * dnu;
}

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::None: return "none";
    case FilterKind::LowPass: return "low_pass";
    case FilterKind::GaussianStop: return "gaussian_stop";
  }
  return "unknown";
}

FilterKind parse_filter_kind(std::string_view name) {
  if (name == "none") return FilterKind::None;
  if (name == "low_pass") return FilterKind::LowPass;
  if (name == "gaussian_stop") return FilterKind::GaussianStop;
  throw ParameterError("unknown filter kind '" + std::string(name) + "'");
}

FilterSpec FilterSpec::none(int class_id) {
  FilterSpec f;
  f.class_id = class_id;
  return f;
}

FilterSpec FilterSpec::low_pass(int class_id, double nu_c, double slew_rate) {
  FilterSpec f;
  f.kind = FilterKind::LowPass;
  f.class_id = class_id;
  f.nu_c = nu_c;
  f.slew_rate = slew_rate;
  return f;
}

FilterSpec FilterSpec::gaussian_stop(int class_id, double nu_c, double sigma_nu, double delta_a) {
  FilterSpec f;
  f.kind = FilterKind::GaussianStop;
  f.class_id = class_id;
  f.nu_c = nu_c;
  f.sigma_nu = sigma_nu;
  f.delta_a = delta_a;
  return f;
}

void FilterSpec::validate() const {
  if (class_id < 1 || class_id > 5) throw ParameterError("filter class_id must be in 1..5");
  if (class_id == 1 && kind != FilterKind::None) throw ParameterError("class 1 is the no-deformation class");
  if (class_id != 1 && kind == FilterKind::None)
    throw ParameterError("class " + std::to_string(class_id) + " needs a deformation filter");
  if (kind == FilterKind::None) return;
  if (!(nu_c >= 0.0)) throw ParameterError("filter nu_c must be >= 0");
  if (kind == FilterKind::LowPass && !(slew_rate > 0.0)) throw ParameterError("low-pass slew_rate must be > 0");
  if (kind == FilterKind::GaussianStop) {
    if (!(sigma_nu > 0.0)) throw ParameterError("gaussian-stop sigma_nu must be > 0");
    if (!(delta_a >= 0.0 && delta_a <= 1.0)) throw ParameterError("gaussian-stop delta_a must lie in [0, 1]");
  }
}

std::vector<FilterSpec> default_filter_bank(PulseFamily family) {
  double lp1 = 2.0;
  double lp2 = 5.0;
  switch (family) {
    case PulseFamily::Sinc: lp1 = 2.0; lp2 = 5.0; break;
    case PulseFamily::Gaussian: lp1 = 3.0; lp2 = 4.0; break;
    case PulseFamily::Chirp: lp1 = 5.0; lp2 = 3.0; break;
  }
  return {
      FilterSpec::none(1),
      FilterSpec::gaussian_stop(2, 0.0, 2.0, 0.4),
      FilterSpec::gaussian_stop(3, 3.0, 2.0, 0.4),
      FilterSpec::low_pass(4, lp1, 0.5),
      FilterSpec::low_pass(5, lp2, 0.5),
  };
}

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> in, bool inverse) {
  const int n = static_cast<int>(in.size());
  std::vector<std::complex<double>> out(in.size());
  if (n == 0) return out;
  fftw_plan plan = plan_cache().get(n, inverse);
  // fftw_execute_dft does not write to its input for out-of-place c2c plans.
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
  if (inverse) {
    const double scale = 1.0 / n;
    for (auto& v : out) v *= scale;
  }
  return out;
}

Spectrum dft_forward(const SampledSignal& signal) {
  std::vector<std::complex<double>> in(signal.samples().begin(), signal.samples().end());
  Spectrum s;
  s.bins = fft(in, false);
  s.dnu = 1.0 / (static_cast<double>(signal.size()) * signal.dt());
  return s;
}

SampledSignal dft_inverse(const Spectrum& spectrum, double t0) {
  const std::size_t n = spectrum.size();
  if (n == 0) throw ParameterError("empty spectrum");
  if (!(spectrum.dnu > 0.0)) throw ParameterError("spectrum resolution must be positive");

  double scale = 0.0;
  for (const auto& b : spectrum.bins) scale = std::max(scale, std::abs(b));
  const double tol = 1e-9 * std::max(scale, 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = spectrum.bins[k];
    const auto& b = spectrum.bins[(n - k) % n];
    if (std::abs(a - std::conj(b)) > tol)
      throw SymmetryError("spectrum is not conjugate-symmetric at bin " + std::to_string(k));
  }

  auto out = fft(spectrum.bins, true);
  std::vector<double> real(n);
  for (std::size_t i = 0; i < n; ++i) real[i] = out[i].real();
  const double dt = 1.0 / (static_cast<double>(n) * spectrum.dnu);
  return SampledSignal(std::move(real), dt, t0);
}

namespace {

// Gain evaluator with the Gaussian-stop normalization computed once.
class GainFunction {
 public:
  explicit GainFunction(const FilterSpec& spec) : spec_(spec) {
    if (!spec.is_deformation()) throw NotAFilterError("class 1 (no deformation) has no filter response");
    if (spec.kind == FilterKind::GaussianStop) peak_ = gaussian_pair_peak(spec.nu_c, spec.sigma_nu);
  }

  double operator()(double nu) const {
    if (spec_.kind == FilterKind::LowPass) {
      return 0.5 * (std::tanh(spec_.slew_rate * (nu + spec_.nu_c)) -
                    std::tanh(spec_.slew_rate * (nu - spec_.nu_c)));
    }
    return 1.0 - spec_.delta_a / peak_ * gaussian_pair(nu, spec_.nu_c, spec_.sigma_nu);
  }

 private:
  FilterSpec spec_;
  double peak_ = 1.0;
};

}  // namespace

double filter_gain(const FilterSpec& spec, double nu) { return GainFunction(spec)(nu); }

SampledSignal apply_deformation(const SampledSignal& signal, const FilterSpec& spec) {
  spec.validate();
  if (!spec.is_deformation()) return signal;
  const GainFunction gain(spec);
  Spectrum s = dft_forward(signal);
  // Gains are even in nu; evaluating at |nu| gives mirrored bins identical factors.
  for (std::size_t k = 0; k < s.size(); ++k) s.bins[k] *= gain(std::abs(s.frequency(k)));
  return dft_inverse(s, signal.t0());
}

std::vector<GainPoint> gain_curve(const FilterSpec& spec, double nu_min, double nu_max, double step) {
  if (!(step > 0.0) || nu_max < nu_min) throw ParameterError("invalid gain-curve grid");
  const auto count = static_cast<std::size_t>(std::llround((nu_max - nu_min) / step)) + 1;
  const GainFunction gain(spec);
  std::vector<GainPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double nu = nu_min + static_cast<double>(i) * step;
    out.push_back({nu, gain(nu)});
  }
  return out;
}

}  // namespace essc
