#include "deepmark/watermark.hpp"

#include <cmath>

namespace deepmark {

std::vector<WatermarkBand> make_band_plan(const WatermarkConfig& cfg, std::size_t num_bits,
                                          int sample_rate_hz) {
    if (num_bits == 0) throw RangeViolation("watermark: message must have at least one bit");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5))
        throw RangeViolation("watermark: alpha must lie in (0, 0.5)");
    if (cfg.band_width_bins < 4)
        throw RangeViolation("watermark: sub-bands must be at least 4 bins wide");

    const double bin_hz = static_cast<double>(sample_rate_hz) / cfg.stft.fft_size;
    const int lo_bin = static_cast<int>(std::ceil(cfg.band_lo_hz / bin_hz));
    const int hi_bin = static_cast<int>(std::floor(cfg.band_hi_hz / bin_hz));
    const int span = hi_bin - lo_bin;
    const int width = cfg.band_width_bins;
    if (span < static_cast<int>(num_bits) * width)
        throw RangeViolation("watermark: band plan does not fit between " +
                             std::to_string(cfg.band_lo_hz) + " and " +
                             std::to_string(cfg.band_hi_hz) + " Hz");

    const int stride = (num_bits > 1)
                           ? (span - width) / (static_cast<int>(num_bits) - 1)
                           : 0;
    std::vector<WatermarkBand> plan;
    plan.reserve(num_bits);
    for (std::size_t l = 0; l < num_bits; ++l) {
        const int lo = lo_bin + static_cast<int>(l) * stride;
        plan.push_back({lo, lo + width / 2, lo + width});
    }
    return plan;
}

Waveform embed(const Waveform& w, const Message& m, const WatermarkConfig& cfg) {
    require_nonempty(w, "embed");
    if (w.duration_s() < 0.5) throw TooShort("embed: input shorter than 0.5 s");
    if (w.rms() < 1e-4) throw WatermarkLowEnergy("embed: carrier RMS below 1e-4");

    const auto plan = make_band_plan(cfg, m.size(), w.sample_rate_hz);
    Spectrogram s = stft(w, cfg.stft);

    for (std::size_t l = 0; l < plan.size(); ++l) {
        const WatermarkBand& band = plan[l];
        const double lower_gain = m.bits[l] ? (1.0 + cfg.alpha) : (1.0 - cfg.alpha);
        const double upper_gain = m.bits[l] ? (1.0 - cfg.alpha) : (1.0 + cfg.alpha);
        for (int t = 0; t < s.num_frames; ++t) {
            for (int k = band.lo; k < band.mid; ++k) s.at(t, k) *= lower_gain;
            for (int k = band.mid; k < band.hi; ++k) s.at(t, k) *= upper_gain;
        }
    }

    Waveform out = istft(s);
    for (double& v : out.samples) v = std::clamp(v, -1.0, 1.0);
    return out;
}

BitScores detect_bits(const Waveform& w, std::size_t num_bits, const WatermarkConfig& cfg) {
    require_nonempty(w, "detect_bits");
    constexpr double kEps = 1e-12;

    const auto plan = make_band_plan(cfg, num_bits, w.sample_rate_hz);
    const Spectrogram s = stft(w, cfg.stft);

    BitScores scores;
    scores.values.assign(num_bits, 0.0);
    for (std::size_t l = 0; l < plan.size(); ++l) {
        const WatermarkBand& band = plan[l];
        double acc = 0.0;
        for (int t = 0; t < s.num_frames; ++t) {
            double e_lower = 0.0;
            double e_upper = 0.0;
            for (int k = band.lo; k < band.mid; ++k) e_lower += std::norm(s.at(t, k));
            for (int k = band.mid; k < band.hi; ++k) e_upper += std::norm(s.at(t, k));
            acc += (e_lower - e_upper) / (e_lower + e_upper + kEps);
        }
        scores.values[l] = acc / s.num_frames;
    }
    return scores;
}

double bit_accuracy(const BitScores& detected, const Message& truth) {
    if (detected.size() != truth.size())
        throw LengthMismatch("bit_accuracy: score and message lengths differ");
    std::size_t matches = 0;
    for (std::size_t l = 0; l < truth.size(); ++l) {
        const bool detected_one = detected.values[l] > 0.0;
        if (detected_one == (truth.bits[l] == 1)) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(truth.size());
}

} // namespace deepmark
