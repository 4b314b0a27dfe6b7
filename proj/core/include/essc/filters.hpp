#pragma once

#include <cstddef>

#include "essc/signal.hpp"

namespace essc {

// Centered moving-window filters. Near the edges the window is truncated to
// the samples that exist (no padding), so it may hold an even count there.

SampledSignal median_filter(const SampledSignal& signal, std::size_t window);
SampledSignal mean_filter(const SampledSignal& signal, std::size_t window);

/// Subtracts the mean of the first and last `edge_window` samples pooled.
SampledSignal offset_correction(const SampledSignal& signal, std::size_t edge_window);

/// Crops to the first/last sample with |f| >= threshold_frac * max|f|, maps
/// the kept span onto t in [0, 1] and scales to max|f| = 1.
SampledSignal detect_and_normalize(const SampledSignal& signal, double threshold_frac = 0.03);

/// Divides by max|f|; an all-zero signal is returned unchanged.
SampledSignal normalize_amplitude(const SampledSignal& signal);

}  // namespace essc
