#include "deepmark/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "deepmark/external_tool.hpp"
#include "deepmark/resample.hpp"
#include "deepmark/wav_io.hpp"

namespace deepmark {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct KindInfo {
    ConditionKind kind;
    const char* name;
    ConditionGroup group;
    SeenCategory category;
};

// Grouping and default seen-category follow the report layout: two sub-groups
// (transmission, manipulation) inside each of the partially-seen and unseen
// blocks.
constexpr KindInfo kKinds[] = {
    {ConditionKind::None, "None", ConditionGroup::None, SeenCategory::NotApplied},
    {ConditionKind::GaussianNoise, "GaussianNoise", ConditionGroup::Transmission, SeenCategory::PartiallySeen},
    {ConditionKind::Dac, "DAC", ConditionGroup::Transmission, SeenCategory::PartiallySeen},
    {ConditionKind::WavTokenizer, "WavTokenizer", ConditionGroup::Transmission, SeenCategory::PartiallySeen},
    {ConditionKind::RandomTrimming, "RandomTrimming", ConditionGroup::Manipulation, SeenCategory::PartiallySeen},
    {ConditionKind::TimeStretch, "TimeStretch", ConditionGroup::Manipulation, SeenCategory::PartiallySeen},
    {ConditionKind::PitchShift, "PitchShift", ConditionGroup::Manipulation, SeenCategory::PartiallySeen},
    {ConditionKind::Musan, "MUSAN", ConditionGroup::Transmission, SeenCategory::Unseen},
    {ConditionKind::Rir, "RIR", ConditionGroup::Transmission, SeenCategory::Unseen},
    {ConditionKind::Quantization, "Quantization", ConditionGroup::Transmission, SeenCategory::Unseen},
    {ConditionKind::Compressor, "Compressor", ConditionGroup::Transmission, SeenCategory::Unseen},
    {ConditionKind::Opus, "Opus", ConditionGroup::Transmission, SeenCategory::Unseen},
    {ConditionKind::Clipping, "Clipping", ConditionGroup::Manipulation, SeenCategory::Unseen},
    {ConditionKind::Overdrive, "Overdrive", ConditionGroup::Manipulation, SeenCategory::Unseen},
    {ConditionKind::Equalizer, "Equalizer", ConditionGroup::Manipulation, SeenCategory::Unseen},
    {ConditionKind::FrequencyMasking, "FrequencyMasking", ConditionGroup::Manipulation, SeenCategory::Unseen},
    {ConditionKind::NoiseGate, "NoiseGate", ConditionGroup::Manipulation, SeenCategory::Unseen},
    {ConditionKind::NoiseReduction, "NoiseReduction", ConditionGroup::Manipulation, SeenCategory::Unseen},
};

const KindInfo& info_for(ConditionKind kind) {
    for (const auto& k : kKinds)
        if (k.kind == kind) return k;
    return kKinds[0];
}

Waveform renorm_if_clipping(Waveform w, bool* flag) {
    const double p = w.peak();
    if (p > 1.0) {
        const double s = 0.999 / p;
        for (double& v : w.samples) v *= s;
        if (flag) *flag = true;
    } else if (flag) {
        *flag = false;
    }
    return w;
}

// Per-sample biquad, direct form II transposed.
struct Biquad {
    double b0, b1, b2, a1, a2;
    void apply(std::vector<double>& x) const {
        double z1 = 0.0, z2 = 0.0;
        for (double& v : x) {
            const double y = b0 * v + z1;
            z1 = b1 * v - a1 * y + z2;
            z2 = b2 * v - a2 * y;
            v = y;
        }
    }
};

Biquad peaking_eq(double center_hz, double q, double gain_db, int rate) {
    const double amp = std::pow(10.0, gain_db / 40.0);
    const double w0 = 2.0 * kPi * center_hz / rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha / amp;
    return Biquad{(1.0 + alpha * amp) / a0, -2.0 * std::cos(w0) / a0, (1.0 - alpha * amp) / a0,
                  -2.0 * std::cos(w0) / a0, (1.0 - alpha / amp) / a0};
}

std::vector<std::filesystem::path> list_wavs_sorted(const std::string& dir) {
    std::vector<std::filesystem::path> out;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
        if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

const char* condition_name(ConditionKind kind) { return info_for(kind).name; }

std::optional<ConditionKind> condition_from_name(const std::string& name) {
    for (const auto& k : kKinds)
        if (name == k.name) return k.kind;
    return std::nullopt;
}

ConditionGroup condition_group(ConditionKind kind) { return info_for(kind).group; }

SeenCategory default_category(ConditionKind kind) { return info_for(kind).category; }

const std::array<ConditionKind, 18>& conditions_in_report_order() {
    static const std::array<ConditionKind, 18> order = [] {
        std::array<ConditionKind, 18> a{};
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = kKinds[i].kind;
        return a;
    }();
    return order;
}

Waveform add_gaussian_noise(const Waveform& w, double snr_db, Rng& rng, bool* renormalized) {
    require_nonempty(w, "add_noise");
    const double p_sig = w.power();
    if (p_sig <= 0.0) throw SilentCarrier("add_noise: carrier has zero power");

    std::vector<double> noise(w.size());
    double p_noise = 0.0;
    for (double& v : noise) {
        v = rng.gaussian();
        p_noise += v * v;
    }
    p_noise /= static_cast<double>(noise.size());

    const double g = std::sqrt(p_sig / (p_noise * std::pow(10.0, snr_db / 10.0)));
    Waveform out = w;
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += g * noise[i];
    return renorm_if_clipping(std::move(out), renormalized);
}

Waveform add_noise_clip(const Waveform& w, const Waveform& noise, double snr_db,
                        bool* renormalized) {
    require_nonempty(w, "add_noise");
    if (noise.empty()) throw SilentCarrier("add_noise: empty noise clip");
    const double p_sig = w.power();
    if (p_sig <= 0.0) throw SilentCarrier("add_noise: carrier has zero power");

    // tile or truncate the clip to the carrier length
    std::vector<double> tiled(w.size());
    double p_noise = 0.0;
    for (std::size_t i = 0; i < tiled.size(); ++i) {
        tiled[i] = noise.samples[i % noise.size()];
        p_noise += tiled[i] * tiled[i];
    }
    p_noise /= static_cast<double>(tiled.size());
    if (p_noise <= 0.0) throw SilentCarrier("add_noise: noise clip has zero power");

    const double g = std::sqrt(p_sig / (p_noise * std::pow(10.0, snr_db / 10.0)));
    Waveform out = w;
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += g * tiled[i];
    return renorm_if_clipping(std::move(out), renormalized);
}

Waveform convolve_rir(const Waveform& w, const Waveform& rir) {
    require_nonempty(w, "convolve_rir");
    if (rir.empty()) throw SilentImpulse("convolve_rir: empty impulse response");
    double peak = 0.0;
    for (double v : rir.samples) peak = std::max(peak, std::abs(v));
    if (peak <= 0.0) throw SilentImpulse("convolve_rir: impulse response has zero energy");

    // FFT convolution, truncated to the carrier length.
    std::size_t conv_len = w.size() + rir.size() - 1;
    std::size_t fft_len = 1;
    while (fft_len < conv_len) fft_len <<= 1;

    std::vector<std::complex<double>> a(fft_len), b(fft_len);
    for (std::size_t i = 0; i < w.size(); ++i) a[i] = w.samples[i];
    for (std::size_t i = 0; i < rir.size(); ++i) b[i] = rir.samples[i] / peak;
    fft_radix2(a, false);
    fft_radix2(b, false);
    for (std::size_t i = 0; i < fft_len; ++i) a[i] *= b[i];
    fft_radix2(a, true);

    Waveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.samples.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.samples[i] = a[i].real();
    return renorm_if_clipping(std::move(out), nullptr);
}

Waveform quantize(const Waveform& w, int bits) {
    if (bits != 8 && bits != 16 && bits != 24 && bits != 32)
        throw RangeViolation("quantize: bits must be one of {8, 16, 24, 32}");
    if (bits == 32) return w; // float passthrough

    const double levels = std::pow(2.0, bits - 1) - 1.0;
    Waveform out = w;
    for (double& v : out.samples) {
        v = std::round(v * levels) / levels;
        v = std::clamp(v, -1.0, 1.0);
    }
    return out;
}

Waveform compress_dynamics(const Waveform& w, double threshold_db, double ratio) {
    const double a_att = std::exp(-1.0 / (0.005 * w.sample_rate_hz));
    const double a_rel = std::exp(-1.0 / (0.050 * w.sample_rate_hz));
    const double slope = 1.0 - 1.0 / ratio;

    Waveform out = w;
    double env = 0.0;
    for (double& v : out.samples) {
        const double mag = std::abs(v);
        const double a = (mag > env) ? a_att : a_rel;
        env = a * env + (1.0 - a) * mag;
        const double level_db = 20.0 * std::log10(std::max(env, 1e-10));
        if (level_db > threshold_db) {
            const double reduction_db = (level_db - threshold_db) * slope;
            v *= std::pow(10.0, -reduction_db / 20.0);
        }
    }
    return out;
}

Waveform clip_percentile(const Waveform& w, double lo_pct, double hi_pct) {
    require_nonempty(w, "clip_percentile");
    if (!(0.0 <= lo_pct && lo_pct < hi_pct && hi_pct <= 100.0))
        throw RangeViolation("clip_percentile: need 0 <= lo < hi <= 100");

    std::vector<double> sorted = w.samples;
    std::sort(sorted.begin(), sorted.end());
    const auto nearest_rank = [&](double pct) -> double {
        if (pct <= 0.0) return sorted.front();
        const std::size_t rank =
            static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(sorted.size())));
        return sorted[std::min(sorted.size() - 1, rank == 0 ? 0 : rank - 1)];
    };
    const double lo = nearest_rank(lo_pct);
    const double hi = nearest_rank(hi_pct);

    Waveform out = w;
    for (double& v : out.samples) v = std::clamp(v, lo, hi);
    return out;
}

Waveform overdrive(const Waveform& w, double gain_db, double colour) {
    require_nonempty(w, "overdrive");
    const double gain = std::pow(10.0, gain_db / 20.0);
    const double offset = colour / 200.0;
    const double peak_in = w.peak();

    Waveform out = w;
    double mean = 0.0;
    for (double& v : out.samples) {
        const double u = std::clamp(gain * v + offset, -1.0, 1.0);
        v = 1.5 * (u - u * u * u / 3.0);
        mean += v;
    }
    mean /= static_cast<double>(out.size());

    double peak_out = 0.0;
    for (double& v : out.samples) {
        v -= mean;
        peak_out = std::max(peak_out, std::abs(v));
    }
    if (peak_out <= 0.0 || peak_in <= 0.0) {
        for (double& v : out.samples) v = 0.0;
        return out;
    }
    const double s = peak_in / peak_out;
    for (double& v : out.samples) v *= s;
    return out;
}

std::pair<std::size_t, std::size_t> trim_bounds(std::size_t len, Rng& rng) {
    const std::size_t s = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(len / 4)));
    const std::size_t e_lo = len - len / 4;
    const std::size_t e = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(e_lo), static_cast<std::int64_t>(len)));
    return {s, e};
}

Waveform trim_random(const Waveform& w, Rng& rng) {
    if (w.duration_s() < 1.0) throw TooShort("trim_random: input shorter than 1 s");
    const auto [s, e] = trim_bounds(w.size(), rng);
    Waveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(s),
                       w.samples.begin() + static_cast<std::ptrdiff_t>(e));
    return out;
}

Waveform equalize(const Waveform& w, const std::array<double, 7>& gains_db) {
    static constexpr std::array<double, 7> kCenters = {125.0, 250.0, 500.0,
                                                       1000.0, 2000.0, 4000.0, 6000.0};
    Waveform out = w;
    for (std::size_t band = 0; band < kCenters.size(); ++band) {
        if (gains_db[band] == 0.0) continue; // identity coefficients
        peaking_eq(kCenters[band], 1.0, gains_db[band], w.sample_rate_hz).apply(out.samples);
    }
    return out;
}

Waveform mask_frequencies(const Waveform& w, int n_bins, Rng& rng, const StftConfig& cfg) {
    if (n_bins < 10 || n_bins > 80)
        throw RangeViolation("mask_frequencies: n_bins must lie in [10, 80]");
    require_nonempty(w, "mask_frequencies");

    // partial Fisher-Yates: first n_bins entries of a shuffled index array
    std::vector<int> idx(static_cast<std::size_t>(cfg.num_bins()));
    for (int i = 0; i < cfg.num_bins(); ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < n_bins; ++i) {
        const std::size_t j = static_cast<std::size_t>(i) +
                              rng.pick(static_cast<std::size_t>(cfg.num_bins() - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }

    // Zeroing a bin once does not silence it: the re-synthesized signal still
    // carries neighbouring-bin skirts that re-analyze into the masked rows.
    // Over-relaxed alternating projection drives the masked rows to zero in
    // the analysis of the *output* signal.
    constexpr double kRelax = 0.7;
    const double target_ratio = std::pow(10.0, -46.0 / 10.0);
    constexpr int kMaxIters = 150;

    double ref_energy = 0.0;
    Waveform y = w;
    for (int iter = 0; iter < kMaxIters; ++iter) {
        Spectrogram s = stft(y, cfg);
        double cur = 0.0;
        for (int i = 0; i < n_bins; ++i) {
            const int k = idx[static_cast<std::size_t>(i)];
            for (int t = 0; t < s.num_frames; ++t) cur += std::norm(s.at(t, k));
        }
        if (iter == 0) {
            ref_energy = cur;
            if (ref_energy <= 0.0) {
                for (int i = 0; i < n_bins; ++i)
                    for (int t = 0; t < s.num_frames; ++t)
                        s.at(t, idx[static_cast<std::size_t>(i)]) = 0.0;
                s.original_length = w.size();
                return istft(s);
            }
        } else if (cur <= ref_energy * target_ratio) {
            break;
        }
        for (int i = 0; i < n_bins; ++i) {
            const int k = idx[static_cast<std::size_t>(i)];
            for (int t = 0; t < s.num_frames; ++t)
                s.at(t, k) *= (iter == 0) ? 0.0 : -kRelax;
        }
        s.original_length = w.size();
        y = istft(s);
    }
    return y;
}

Waveform noise_gate(const Waveform& w, const StftConfig& cfg) {
    require_nonempty(w, "noise_gate");
    Spectrogram s = stft(w, cfg);
    const int nt = s.num_frames;
    const int nb = s.num_bins;

    std::vector<double> mag(static_cast<std::size_t>(nt) * nb);
    std::vector<double> frame_energy(static_cast<std::size_t>(nt), 0.0);
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < nb; ++k) {
            const double m = std::abs(s.at(t, k));
            mag[static_cast<std::size_t>(t) * nb + k] = m;
            frame_energy[static_cast<std::size_t>(t)] += m * m;
        }
    }

    // gate statistic: locally smoothed magnitude, so isolated noise peaks
    // cannot slip past the threshold; adjacent bins are correlated through
    // the window main lobe, hence the wide raised-cosine neighbourhood
    static constexpr int kTimeHalf = 3;
    static constexpr int kFreqHalf = 4;
    std::vector<double> smooth(static_cast<std::size_t>(nt) * nb, 0.0);
    auto rc = [](int i, int half) {
        return 0.5 + 0.5 * std::cos(kPi * i / (half + 1));
    };
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < nb; ++k) {
            double acc = 0.0;
            double wsum = 0.0;
            for (int dt = -kTimeHalf; dt <= kTimeHalf; ++dt) {
                const int tt = t + dt;
                if (tt < 0 || tt >= nt) continue;
                for (int dk = -kFreqHalf; dk <= kFreqHalf; ++dk) {
                    const int kk = k + dk;
                    if (kk < 0 || kk >= nb) continue;
                    const double wgt = rc(dt, kTimeHalf) * rc(dk, kFreqHalf);
                    acc += wgt * mag[static_cast<std::size_t>(tt) * nb + kk];
                    wsum += wgt;
                }
            }
            smooth[static_cast<std::size_t>(t) * nb + k] = acc / wsum;
        }
    }

    // noise floor estimate: median of the statistic over the quietest 10% of
    // frames (ranked by frame energy)
    std::vector<int> order(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) order[static_cast<std::size_t>(t)] = t;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return frame_energy[static_cast<std::size_t>(a)] < frame_energy[static_cast<std::size_t>(b)];
    });
    const int quiet_count = std::max(1, nt / 10);
    std::vector<double> quiet_stats;
    quiet_stats.reserve(static_cast<std::size_t>(quiet_count) * nb);
    for (int q = 0; q < quiet_count; ++q) {
        const int t = order[static_cast<std::size_t>(q)];
        for (int k = 0; k < nb; ++k)
            quiet_stats.push_back(smooth[static_cast<std::size_t>(t) * nb + k]);
    }
    std::nth_element(quiet_stats.begin(), quiet_stats.begin() + quiet_stats.size() / 2,
                     quiet_stats.end());
    const double threshold = 1.5 * quiet_stats[quiet_stats.size() / 2];

    constexpr double kFloorGain = 0.01; // -40 dB
    std::vector<double> gain(static_cast<std::size_t>(nt) * nb);
    for (std::size_t i = 0; i < gain.size(); ++i)
        gain[i] = (smooth[i] < threshold) ? kFloorGain : 1.0;

    // 3-frame raised-cosine smoothing of the gain mask along time
    std::vector<double> gain_smooth(gain.size());
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < nb; ++k) {
            double acc = 0.0;
            double wsum = 0.0;
            for (int dt = -1; dt <= 1; ++dt) {
                const int tt = t + dt;
                if (tt < 0 || tt >= nt) continue;
                acc += rc(dt, 1) * gain[static_cast<std::size_t>(tt) * nb + k];
                wsum += rc(dt, 1);
            }
            gain_smooth[static_cast<std::size_t>(t) * nb + k] = acc / wsum;
        }
    }

    for (int t = 0; t < nt; ++t)
        for (int k = 0; k < nb; ++k)
            s.at(t, k) *= gain_smooth[static_cast<std::size_t>(t) * nb + k];
    return istft(s);
}

Waveform time_stretch(const Waveform& w, double rate, const StftConfig& cfg) {
    if (!(rate >= 0.5 && rate <= 2.0))
        throw RangeViolation("time_stretch: rate must lie in [0.5, 2.0]");
    require_nonempty(w, "time_stretch");

    const Spectrogram d = stft(w, cfg);
    const int nb = d.num_bins;
    const int in_frames = d.num_frames;
    const int out_frames = static_cast<int>(std::ceil(static_cast<double>(in_frames) / rate));

    Spectrogram out;
    out.config = cfg;
    out.num_bins = nb;
    out.num_frames = out_frames;
    out.sample_rate_hz = w.sample_rate_hz;
    out.original_length = static_cast<std::size_t>(
        std::llround(static_cast<double>(w.size()) / rate));
    out.data.resize(static_cast<std::size_t>(out_frames) * nb);

    // expected per-hop phase advance per bin
    std::vector<double> omega(static_cast<std::size_t>(nb));
    for (int k = 0; k < nb; ++k)
        omega[static_cast<std::size_t>(k)] = 2.0 * kPi * k * cfg.hop / cfg.fft_size;

    std::vector<double> phase(static_cast<std::size_t>(nb));
    for (int k = 0; k < nb; ++k) phase[static_cast<std::size_t>(k)] = std::arg(d.at(0, k));

    for (int j = 0; j < out_frames; ++j) {
        const double t = std::min(static_cast<double>(j) * rate,
                                  static_cast<double>(in_frames - 1));
        const int i0 = static_cast<int>(t);
        const int i1 = std::min(i0 + 1, in_frames - 1);
        const double frac = t - i0;
        for (int k = 0; k < nb; ++k) {
            const std::complex<double> c0 = d.at(i0, k);
            const std::complex<double> c1 = d.at(i1, k);
            const double mag = (1.0 - frac) * std::abs(c0) + frac * std::abs(c1);
            out.at(j, k) = std::polar(mag, phase[static_cast<std::size_t>(k)]);
            double dphi = std::arg(c1) - std::arg(c0) - omega[static_cast<std::size_t>(k)];
            dphi -= 2.0 * kPi * std::round(dphi / (2.0 * kPi));
            phase[static_cast<std::size_t>(k)] += omega[static_cast<std::size_t>(k)] + dphi;
        }
    }
    return istft(out);
}

Waveform pitch_shift(const Waveform& w, double semitones, const StftConfig& cfg) {
    if (!(semitones >= -5.0 && semitones <= 5.0))
        throw RangeViolation("pitch_shift: semitones must lie in [-5, 5]");
    require_nonempty(w, "pitch_shift");

    const double rate = std::pow(2.0, -semitones / 12.0);
    const Waveform stretched = time_stretch(w, rate, cfg);
    Waveform shifted = resample_by_ratio(stretched, rate);
    shifted.sample_rate_hz = w.sample_rate_hz;

    // restore the exact input duration
    shifted.samples.resize(w.size(), 0.0);
    return shifted;
}

Waveform synth_pink_noise(std::size_t len, int rate, Rng& rng) {
    // Kellet's three-row pink filter over white Gaussian input
    Waveform out;
    out.sample_rate_hz = rate;
    out.samples.resize(len);
    double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
    for (double& v : out.samples) {
        const double white = rng.gaussian();
        b0 = 0.99886 * b0 + white * 0.0555179;
        b1 = 0.99332 * b1 + white * 0.0750759;
        b2 = 0.96900 * b2 + white * 0.1538520;
        b3 = 0.86650 * b3 + white * 0.3104856;
        b4 = 0.55000 * b4 + white * 0.5329522;
        b5 = -0.7616 * b5 - white * 0.0168980;
        v = 0.11 * (b0 + b1 + b2 + b3 + b4 + b5 + b6 + white * 0.5362);
        b6 = white * 0.115926;
    }
    return out;
}

Waveform synth_exp_decay_rir(int rate, Rng& rng) {
    const double rt60 = rng.uniform(0.15, 0.6);
    const std::size_t len = static_cast<std::size_t>(rt60 * rate);
    Waveform rir;
    rir.sample_rate_hz = rate;
    rir.samples.resize(len);
    rir.samples[0] = 1.0; // direct path
    for (std::size_t n = 1; n < len; ++n) {
        const double decay = std::exp(-6.908 * static_cast<double>(n) / (rt60 * rate));
        rir.samples[n] = 0.3 * rng.gaussian() * decay;
    }
    return rir;
}

ConditionOutcome apply_condition(const ConditionSpec& spec, const Waveform& w,
                                 const TrialSeed& seed) {
    require_nonempty(w, "apply_condition");
    Rng rng(seed.derive());
    nlohmann::json params = nlohmann::json::object();
    params["condition"] = spec.id();

    switch (spec.kind) {
        case ConditionKind::None:
            return {w, params};

        case ConditionKind::GaussianNoise: {
            static constexpr double kSnrChoices[3] = {5.0, 10.0, 15.0};
            const double snr = kSnrChoices[rng.pick(3)];
            params["snr_db"] = snr;
            bool renorm = false;
            Waveform out = add_gaussian_noise(w, snr, rng, &renorm);
            if (renorm) params["renormalized"] = true;
            return {std::move(out), params};
        }

        case ConditionKind::Musan: {
            Waveform noise;
            const auto files = spec.resources.musan_dir.empty()
                                   ? std::vector<std::filesystem::path>{}
                                   : list_wavs_sorted(spec.resources.musan_dir);
            if (!files.empty()) {
                const auto& pickp = files[rng.pick(files.size())];
                noise = read_pcm(pickp);
                if (noise.sample_rate_hz != w.sample_rate_hz)
                    noise = resample(noise, w.sample_rate_hz);
                params["noise_file"] = pickp.filename().string();
            } else {
                noise = synth_pink_noise(w.size(), w.sample_rate_hz, rng);
                params["noise_file"] = "synthetic-pink";
            }
            params["snr_db"] = 10.0;
            bool renorm = false;
            Waveform out = add_noise_clip(w, noise, 10.0, &renorm);
            if (renorm) params["renormalized"] = true;
            return {std::move(out), params};
        }

        case ConditionKind::Rir: {
            Waveform rir;
            const auto files = spec.resources.rir_dir.empty()
                                   ? std::vector<std::filesystem::path>{}
                                   : list_wavs_sorted(spec.resources.rir_dir);
            if (!files.empty()) {
                const auto& pickp = files[rng.pick(files.size())];
                rir = read_pcm(pickp);
                if (rir.sample_rate_hz != w.sample_rate_hz) rir = resample(rir, w.sample_rate_hz);
                params["rir_file"] = pickp.filename().string();
            } else {
                rir = synth_exp_decay_rir(w.sample_rate_hz, rng);
                params["rir_file"] = "synthetic-exp-decay";
            }
            return {convolve_rir(w, rir), params};
        }

        case ConditionKind::Quantization: {
            static constexpr int kBitChoices[4] = {8, 16, 24, 32};
            const int bits = kBitChoices[rng.pick(4)];
            params["bits"] = bits;
            if (bits == 32) params["passthrough"] = true;
            return {quantize(w, bits), params};
        }

        case ConditionKind::Compressor: {
            const double thr = rng.uniform(-50.0, -10.0);
            const double ratio = rng.uniform(2.0, 10.0);
            params["threshold_db"] = thr;
            params["ratio"] = ratio;
            return {compress_dynamics(w, thr, ratio), params};
        }

        case ConditionKind::Opus: {
            if (spec.resources.opus_tool.empty())
                throw SkippedCondition("Opus: no codec tool configured");
            static constexpr int kBitrates[6] = {1, 2, 4, 8, 16, 31};
            const int kbps = kBitrates[rng.pick(6)];
            params["bitrate_kbps"] = kbps;
            return {external_condition(w, spec.resources.opus_tool, {std::to_string(kbps)}),
                    params};
        }

        case ConditionKind::Dac: {
            if (spec.resources.dac_tool.empty())
                throw SkippedCondition("DAC: no codec tool configured");
            return {external_condition(w, spec.resources.dac_tool, {}), params};
        }

        case ConditionKind::WavTokenizer: {
            if (spec.resources.wavtokenizer_tool.empty())
                throw SkippedCondition("WavTokenizer: no codec tool configured");
            return {external_condition(w, spec.resources.wavtokenizer_tool, {}), params};
        }

        case ConditionKind::Clipping:
            params["lo_pct"] = 1.0;
            params["hi_pct"] = 99.0;
            return {clip_percentile(w, 1.0, 99.0), params};

        case ConditionKind::Overdrive: {
            const double gain_db = rng.uniform(0.0, 50.0);
            const double colour = rng.uniform(0.0, 50.0);
            params["gain_db"] = gain_db;
            params["colour"] = colour;
            return {overdrive(w, gain_db, colour), params};
        }

        case ConditionKind::RandomTrimming: {
            if (w.duration_s() < 1.0) throw TooShort("RandomTrimming: input shorter than 1 s");
            const auto [s, e] = trim_bounds(w.size(), rng);
            params["start_sample"] = s;
            params["end_sample"] = e;
            Waveform out;
            out.sample_rate_hz = w.sample_rate_hz;
            out.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(s),
                               w.samples.begin() + static_cast<std::ptrdiff_t>(e));
            return {std::move(out), params};
        }

        case ConditionKind::Equalizer: {
            std::array<double, 7> gains{};
            for (double& g : gains) g = rng.uniform(-12.0, 12.0);
            params["gains_db"] = gains;
            bool renorm = false;
            Waveform out = renorm_if_clipping(equalize(w, gains), &renorm);
            if (renorm) params["renormalized"] = true;
            return {std::move(out), params};
        }

        case ConditionKind::FrequencyMasking: {
            const int n = static_cast<int>(rng.uniform_int(10, 80));
            params["n_bins"] = n;
            bool renorm = false;
            Waveform out = renorm_if_clipping(mask_frequencies(w, n, rng), &renorm);
            if (renorm) params["renormalized"] = true;
            return {std::move(out), params};
        }

        case ConditionKind::NoiseGate: {
            bool renorm = false;
            Waveform out = renorm_if_clipping(noise_gate(w), &renorm);
            if (renorm) params["renormalized"] = true;
            return {std::move(out), params};
        }

        case ConditionKind::NoiseReduction: {
            if (spec.resources.noise_reduction_tool.empty())
                throw SkippedCondition("NoiseReduction: no enhancement tool configured");
            return {external_condition(w, spec.resources.noise_reduction_tool, {}), params};
        }

        case ConditionKind::TimeStretch: {
            const double rate = rng.uniform(0.5, 2.0);
            params["rate"] = rate;
            bool renorm = false;
            Waveform out = renorm_if_clipping(time_stretch(w, rate), &renorm);
            if (renorm) params["renormalized"] = true;
            return {std::move(out), params};
        }

        case ConditionKind::PitchShift: {
            const double semitones = rng.uniform(-5.0, 5.0);
            params["semitones"] = semitones;
            bool renorm = false;
            Waveform out = renorm_if_clipping(pitch_shift(w, semitones), &renorm);
            if (renorm) params["renormalized"] = true;
            return {std::move(out), params};
        }
    }
    throw RangeViolation("apply_condition: unknown condition kind");
}

} // namespace deepmark
