#pragma once

#include <complex>
#include <vector>

#include "deepmark/waveform.hpp"

namespace deepmark {

/// Analysis parameters. The default (periodic Hann, 50% overlap) satisfies
/// constant-overlap-add, so stft followed by istft reconstructs the input
/// exactly up to floating-point error.
struct StftConfig {
    int fft_size = 1024; // positive even, power of two
    int hop = 512;       // <= fft_size

    int num_bins() const { return fft_size / 2 + 1; }
};

/// Complex STFT coefficients, frames-major. original_length remembers the
/// exact sample count for inversion.
struct Spectrogram {
    std::vector<std::complex<double>> data; // num_frames * num_bins
    int num_frames = 0;
    int num_bins = 0;
    StftConfig config;
    std::size_t original_length = 0;
    int sample_rate_hz = 16000;

    std::complex<double>& at(int frame, int bin) { return data[static_cast<std::size_t>(frame) * num_bins + bin]; }
    const std::complex<double>& at(int frame, int bin) const {
        return data[static_cast<std::size_t>(frame) * num_bins + bin];
    }
};

/// In-place radix-2 FFT over a power-of-two-sized buffer. inverse=true
/// applies the conjugate transform including the 1/N factor.
void fft_radix2(std::vector<std::complex<double>>& buf, bool inverse);

/// Centered STFT with reflective padding; frame count = ceil(len / hop).
Spectrogram stft(const Waveform& w, const StftConfig& cfg = {});

/// Inverse STFT via windowed overlap-add with envelope normalization.
/// Output length equals s.original_length exactly.
Waveform istft(const Spectrogram& s);

/// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

} // namespace deepmark
