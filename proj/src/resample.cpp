#include "deepmark/resample.hpp"

#include <cmath>

namespace deepmark {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kHalfTaps = 32; // 64-tap kernel

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

} // namespace

Waveform resample_by_ratio(const Waveform& w, double ratio) {
    if (!(ratio > 0.0)) throw RangeViolation("resample ratio must be positive");
    if (w.empty()) return w;

    const double cutoff = std::min(1.0, ratio); // relative to input Nyquist
    const long long n = static_cast<long long>(w.size());
    const long long out_len = std::llround(static_cast<double>(n) * ratio);

    Waveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.samples.resize(static_cast<std::size_t>(out_len));

    for (long long j = 0; j < out_len; ++j) {
        const double t = static_cast<double>(j) / ratio; // position in input samples
        const long long m0 = static_cast<long long>(std::floor(t)) - (kHalfTaps - 1);
        double acc = 0.0;
        double ksum = 0.0;
        for (long long m = m0; m < m0 + 2 * kHalfTaps; ++m) {
            const double u = static_cast<double>(m) - t;
            // Hann-windowed sinc; the window reaches zero at |u| = kHalfTaps.
            const double win = 0.5 + 0.5 * std::cos(kPi * u / kHalfTaps);
            const double k = cutoff * sinc(cutoff * u) * win;
            ksum += k;
            if (m >= 0 && m < n) acc += k * w.samples[static_cast<std::size_t>(m)];
        }
        out.samples[static_cast<std::size_t>(j)] = (ksum != 0.0) ? acc / ksum : 0.0;
    }
    return out;
}

Waveform resample(const Waveform& w, int target_rate_hz) {
    if (target_rate_hz <= 0) throw RangeViolation("target sample rate must be positive");
    if (target_rate_hz == w.sample_rate_hz) return w;
    Waveform out = resample_by_ratio(
        w, static_cast<double>(target_rate_hz) / static_cast<double>(w.sample_rate_hz));
    out.sample_rate_hz = target_rate_hz;
    return out;
}

} // namespace deepmark
