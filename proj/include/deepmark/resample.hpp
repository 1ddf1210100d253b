#pragma once

#include "deepmark/waveform.hpp"

namespace deepmark {

/// Band-limited resampling by an arbitrary rate ratio (output rate / input
/// rate) using a 64-tap windowed-sinc kernel with cutoff at the lower of the
/// two Nyquist frequencies. Output length = round(len * ratio). The returned
/// waveform keeps the input's sample_rate_hz label; callers relabel.
Waveform resample_by_ratio(const Waveform& w, double ratio);

/// Resample to target_rate_hz. Identity (copy) when rates match.
Waveform resample(const Waveform& w, int target_rate_hz);

} // namespace deepmark
