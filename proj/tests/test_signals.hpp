#pragma once

// Shared generators and measurement oracles for the test suites. Everything
// here is independent of the library's transform path: spectrum peaks are
// located with a plain DFT, energies with direct sums.

#include <cmath>
#include <complex>
#include <vector>

#include "deepmark/rng.hpp"
#include "deepmark/waveform.hpp"

namespace testsig {

constexpr double kPi = 3.14159265358979323846;

inline deepmark::Waveform sine(double freq_hz, double duration_s, int rate = 16000,
                               double amp = 0.5, double phase = 0.0) {
    deepmark::Waveform w;
    w.sample_rate_hz = rate;
    const std::size_t n = static_cast<std::size_t>(duration_s * rate);
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.samples[i] = amp * std::sin(2.0 * kPi * freq_hz * static_cast<double>(i) / rate + phase);
    return w;
}

inline deepmark::Waveform white_noise(double duration_s, std::uint64_t seed, int rate = 16000,
                                      double amp = 0.3) {
    deepmark::Rng rng(seed);
    deepmark::Waveform w;
    w.sample_rate_hz = rate;
    const std::size_t n = static_cast<std::size_t>(duration_s * rate);
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.samples[i] = amp * (2.0 * rng.next_double() - 1.0);
    return w;
}

// Naive DFT magnitude at an arbitrary frequency (Goertzel-style probe).
inline double dft_magnitude(const std::vector<double>& x, double freq_hz, int rate) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ang = -2.0 * kPi * freq_hz * static_cast<double>(i) / rate;
        acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return std::abs(acc) / static_cast<double>(x.size());
}

// Dominant frequency via dense DFT scan over [lo, hi] with the given step.
inline double dominant_frequency(const std::vector<double>& x, int rate, double lo_hz,
                                 double hi_hz, double step_hz = 0.5) {
    double best_f = lo_hz;
    double best_m = -1.0;
    for (double f = lo_hz; f <= hi_hz; f += step_hz) {
        const double m = dft_magnitude(x, f, rate);
        if (m > best_m) {
            best_m = m;
            best_f = f;
        }
    }
    return best_f;
}

inline double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

inline double rms(const std::vector<double>& x, std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += x[i] * x[i];
    return std::sqrt(acc / static_cast<double>(end - begin));
}

// Normalized cross-correlation at zero lag over the common length.
inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += a[i] * b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

// Best normalized correlation over small lags in [-max_lag, max_lag].
inline double correlation_best_lag(const std::vector<double>& a, const std::vector<double>& b,
                                   int max_lag) {
    double best = -1.0;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const long long j = static_cast<long long>(i) + lag;
            if (j < 0 || j >= static_cast<long long>(b.size())) continue;
            sab += a[i] * b[static_cast<std::size_t>(j)];
            saa += a[i] * a[i];
            sbb += b[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(j)];
        }
        if (saa > 0.0 && sbb > 0.0) best = std::max(best, sab / std::sqrt(saa * sbb));
    }
    return best;
}

inline double snr_db(const std::vector<double>& reference, const std::vector<double>& test) {
    double ps = 0.0, pn = 0.0;
    const std::size_t n = std::min(reference.size(), test.size());
    for (std::size_t i = 0; i < n; ++i) {
        ps += reference[i] * reference[i];
        const double d = test[i] - reference[i];
        pn += d * d;
    }
    if (pn <= 0.0) return 1e9;
    return 10.0 * std::log10(ps / pn);
}

} // namespace testsig
