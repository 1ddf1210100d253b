#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "deepmark/errors.hpp"

namespace deepmark {

/// Mono PCM amplitude sequence with a declared sample rate. Samples are
/// dimensionless, nominally in [-1, 1]. Immutable by convention: every
/// operation takes a Waveform by const reference and returns a new one.
struct Waveform {
    std::vector<double> samples;
    int sample_rate_hz = 16000;

    Waveform() = default;
    Waveform(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate_hz(rate) {}

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }

    double rms() const {
        if (samples.empty()) return 0.0;
        double acc = 0.0;
        for (double v : samples) acc += v * v;
        return std::sqrt(acc / static_cast<double>(samples.size()));
    }

    double power() const {
        if (samples.empty()) return 0.0;
        double acc = 0.0;
        for (double v : samples) acc += v * v;
        return acc / static_cast<double>(samples.size());
    }

    double peak() const {
        double p = 0.0;
        for (double v : samples) p = std::max(p, std::abs(v));
        return p;
    }
};

inline void require_nonempty(const Waveform& w, const char* op) {
    if (w.empty()) throw EmptyInput(std::string(op) + ": empty waveform");
}

} // namespace deepmark
