#pragma once

#include <vector>

#include "deepmark/message.hpp"
#include "deepmark/stft.hpp"
#include "deepmark/waveform.hpp"

namespace deepmark {

/// One watermark sub-band: bins [lo, mid) form the lower half, [mid, hi) the
/// upper half. Bit 1 boosts the lower half and cuts the upper; bit 0 the
/// reverse.
struct WatermarkBand {
    int lo;
    int mid;
    int hi;
};

// Defaults calibrated jointly with the toy fixture generator so that the
// embedding SNR stays above 25 dB while sign-thresholded detection recovers
// every bit on clean and half-trimmed fixtures.
struct WatermarkConfig {
    double alpha = 0.18;       // magnitude modulation depth, in (0, 0.5)
    double band_lo_hz = 430.0; // bins below are never touched (codec-fragile)
    double band_hi_hz = 7000.0;
    int band_width_bins = 10;  // per sub-band; split into two halves
    StftConfig stft{1024, 256}; // 75% overlap: extra frame redundancy for detection
};

/// Disjoint sub-bands spread evenly across [band_lo_hz, band_hi_hz].
std::vector<WatermarkBand> make_band_plan(const WatermarkConfig& cfg, std::size_t num_bits,
                                          int sample_rate_hz);

/// Scale each sub-band's half magnitudes by (1 +/- alpha) per the message
/// bit, frame by frame, preserving phase; resynthesize and clamp to [-1, 1].
Waveform embed(const Waveform& w, const Message& m, const WatermarkConfig& cfg = {});

/// Per-bit scores: mean over frames of the normalized half-band energy
/// difference (E_lower - E_upper) / (E_lower + E_upper + eps).
BitScores detect_bits(const Waveform& w, std::size_t num_bits, const WatermarkConfig& cfg = {});

/// Fraction of bits whose score sign matches the message (threshold 0).
double bit_accuracy(const BitScores& detected, const Message& truth);

} // namespace deepmark
