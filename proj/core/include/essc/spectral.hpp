#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "essc/signal.hpp"

namespace essc {

/// DFT bins in the standard wrap-around order; bin k has frequency k * dnu for
/// k < (N+1)/2 and (k - N) * dnu above that.
struct Spectrum {
  std::vector<std::complex<double>> bins;
  double dnu = 1.0;

  std::size_t size() const { return bins.size(); }
  double frequency(std::size_t k) const;
};

enum class FilterKind { None, LowPass, GaussianStop };

std::string_view to_string(FilterKind kind);
FilterKind parse_filter_kind(std::string_view name);

/// Deformation filter of one class. class_id 1 is the undeformed class.
struct FilterSpec {
  FilterKind kind = FilterKind::None;
  double nu_c = 0.0;
  double slew_rate = 0.0;  // LowPass
  double sigma_nu = 0.0;   // GaussianStop
  double delta_a = 0.0;    // GaussianStop
  int class_id = 1;

  static FilterSpec none(int class_id = 1);
  static FilterSpec low_pass(int class_id, double nu_c, double slew_rate);
  static FilterSpec gaussian_stop(int class_id, double nu_c, double sigma_nu, double delta_a);

  bool is_deformation() const { return class_id != 1 && kind != FilterKind::None; }
  void validate() const;
  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

/// The five-class bank (ND, F_G1, F_G2, F_LP1, F_LP2) used for a pulse family.
std::vector<FilterSpec> default_filter_bank(PulseFamily family);

Spectrum dft_forward(const SampledSignal& signal);
/// Throws SymmetryError when the spectrum is not the transform of a real signal.
SampledSignal dft_inverse(const Spectrum& spectrum, double t0 = 0.0);

/// Complex forward/inverse DFT without scaling checks; inverse divides by N.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> in, bool inverse);

/// Gain of a deformation filter at signed frequency nu.
double filter_gain(const FilterSpec& spec, double nu);

/// Bin-wise product of the spectrum with the filter gain, transformed back.
SampledSignal apply_deformation(const SampledSignal& signal, const FilterSpec& spec);

struct GainPoint {
  double nu;
  double gain;
};
std::vector<GainPoint> gain_curve(const FilterSpec& spec, double nu_min, double nu_max, double step);

}  // namespace essc
