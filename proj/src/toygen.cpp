#include "deepmark/toygen.hpp"

#include <cmath>
#include <complex>
#include <fstream>

#include "deepmark/stft.hpp"
#include "deepmark/wav_io.hpp"

namespace deepmark {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kRate = 16000;

// Spectral amplitude envelope for the breath component: formant-style bumps
// over stepped plateaus. The plateau steps sit between the reference
// watermarker's default sub-bands, which keeps each sub-band locally flat
// while the upper spectrum still falls far enough for noise-robustness
// studies to bite.
struct BreathEnvelope {
    double f1, f2, f3; // bump centres
    double s1, s2, s3; // bump widths
    double g1, g2, g3; // bump linear gains
    double step_db;

    static BreathEnvelope draw(Rng& rng, bool fake) {
        BreathEnvelope e;
        e.f1 = rng.uniform(450.0, 700.0);
        e.f2 = rng.uniform(1000.0, 1600.0);
        e.f3 = rng.uniform(2300.0, 3000.0);
        e.s1 = rng.uniform(450.0, 600.0);
        e.s2 = rng.uniform(500.0, 650.0);
        e.s3 = rng.uniform(500.0, 650.0);
        e.g1 = std::pow(10.0, rng.uniform(1.5, 2.8) / 20.0) - 1.0;
        e.g2 = std::pow(10.0, rng.uniform(1.0, 2.4) / 20.0) - 1.0;
        e.g3 = std::pow(10.0, rng.uniform(0.8, 2.0) / 20.0) - 1.0;
        e.step_db = fake ? rng.uniform(-10.0, -8.5) : rng.uniform(-9.5, -8.7);
        return e;
    }

    double operator()(double f) const {
        // cumulative raised-cosine level steps centred in the sub-band gaps
        static constexpr double kStepLo[3] = {4450.0, 5290.0, 6130.0};
        static constexpr double kStepHi[3] = {4600.0, 5450.0, 6290.0};
        double level_db = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (f >= kStepHi[i]) {
                level_db += step_db;
            } else if (f > kStepLo[i]) {
                const double x = (f - kStepLo[i]) / (kStepHi[i] - kStepLo[i]);
                level_db += step_db * (0.5 - 0.5 * std::cos(kPi * x));
            }
        }
        double amp = std::pow(10.0, level_db / 20.0);
        if (f < 430.0) amp *= 1.35; // low band carries extra body
        if (f > 7150.0) amp *= std::pow(10.0, -(f - 7150.0) / 450.0);

        const double b1 = g1 * std::exp(-0.5 * (f - f1) * (f - f1) / (s1 * s1));
        const double b2 = g2 * std::exp(-0.5 * (f - f2) * (f - f2) / (s2 * s2));
        const double b3 = g3 * std::exp(-0.5 * (f - f3) * (f - f3) / (s3 * s3));
        return amp * (1.0 + b1 + b2 + b3);
    }
};

// Stationary Gaussian noise with the given amplitude spectrum, via
// random-phase spectral synthesis.
std::vector<double> spectral_noise(std::size_t n, const BreathEnvelope& env, Rng& rng) {
    std::size_t n2 = 1;
    while (n2 < n) n2 <<= 1;
    std::vector<std::complex<double>> spec(n2, {0.0, 0.0});
    for (std::size_t k = 1; k < n2 / 2; ++k) {
        const double f = static_cast<double>(k) * kRate / static_cast<double>(n2);
        const double a = env(f);
        spec[k] = {a * rng.gaussian(), a * rng.gaussian()};
        spec[n2 - k] = std::conj(spec[k]);
    }
    fft_radix2(spec, true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real();
    return out;
}

} // namespace

Waveform synth_toy_waveform(Rng& rng, bool fake) {
    const double duration = 1.5 + 1.5 * rng.next_double();
    const std::size_t n = static_cast<std::size_t>(duration * kRate);

    // voiced buzz below 300 Hz: fundamental plus one harmonic
    const double f0 = rng.uniform(105.0, 140.0);
    const double a2 = fake ? rng.uniform(0.35, 0.5) : rng.uniform(0.5, 0.65);
    const double h2_ratio = fake ? 2.03 : 2.0; // fakes carry a slightly inharmonic partial
    const double vib_rate = rng.uniform(4.0, 6.0);
    const double vib_depth = fake ? 0.022 : 0.015;
    const double phase0 = rng.uniform(0.0, 2.0 * kPi);
    const double vib_phase = rng.uniform(0.0, 2.0 * kPi);
    const double jitter_scale = fake ? 0.004 : 0.0;

    const double breath_ratio = fake ? 0.62 : 0.42; // breath RMS relative to buzz RMS
    const double floor_db = fake ? -34.0 : -36.0;

    std::vector<double> buzz(n);
    double phase1 = phase0, phase2 = phase0 * 0.7;
    double jitter = 0.0;
    double buzz_pow = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / kRate;
        if (jitter_scale > 0.0) jitter = 0.999 * jitter + jitter_scale * rng.gaussian();
        const double f = f0 * (1.0 + vib_depth * std::sin(2.0 * kPi * vib_rate * t + vib_phase) +
                               0.008 * std::sin(2.0 * kPi * 0.4 * t) + jitter);
        phase1 += 2.0 * kPi * f / kRate;
        phase2 += 2.0 * kPi * h2_ratio * f / kRate;
        buzz[i] = std::sin(phase1) + a2 * std::sin(phase2);
        buzz_pow += buzz[i] * buzz[i];
    }
    buzz_pow /= static_cast<double>(n);

    const BreathEnvelope env = BreathEnvelope::draw(rng, fake);
    std::vector<double> breath = spectral_noise(n, env, rng);
    double breath_pow = 0.0;
    for (double v : breath) breath_pow += v * v;
    breath_pow /= static_cast<double>(n);
    const double breath_gain =
        (breath_pow > 0.0) ? breath_ratio * std::sqrt(buzz_pow / breath_pow) : 0.0;

    const double am_rate = rng.uniform(2.0, 4.0);
    const double am_phase = rng.uniform(0.0, 2.0 * kPi);

    Waveform w;
    w.sample_rate_hz = kRate;
    w.samples.resize(n);
    double sig_pow = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / kRate;
        const double am = 0.7 + 0.3 * std::sin(2.0 * kPi * am_rate * t + am_phase);
        w.samples[i] = am * (buzz[i] + breath_gain * breath[i]);
        sig_pow += w.samples[i] * w.samples[i];
    }
    sig_pow /= static_cast<double>(n);

    // flat noise floor keeps the upper spectrum alive at a known low level
    const double floor_rms = std::sqrt(sig_pow) * std::pow(10.0, floor_db / 20.0);
    for (double& v : w.samples) v += floor_rms * rng.gaussian();

    // edge fades, 30 ms raised cosine
    const std::size_t fade = static_cast<std::size_t>(0.03 * kRate);
    for (std::size_t i = 0; i < fade && i < n; ++i) {
        const double g = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(i) / fade);
        w.samples[i] *= g;
        w.samples[n - 1 - i] *= g;
    }

    // normalize to a comfortable RMS, protect the peak
    const double target_rms = 0.09 + 0.05 * rng.next_double();
    const double rms = w.rms();
    if (rms > 0.0) {
        double s = target_rms / rms;
        const double peak = w.peak() * s;
        if (peak > 0.95) s *= 0.95 / peak;
        for (double& v : w.samples) v *= s;
    }
    return w;
}

ToySet synth_toy_trials(int n_real, int n_fake, std::uint64_t seed) {
    if (n_real < 1 || n_fake < 1)
        throw RangeViolation("synth_toy_trials: counts must be at least 1");

    ToySet set;
    char buf[32];
    for (int i = 0; i < n_real; ++i) {
        std::snprintf(buf, sizeof(buf), "TOY_R_%04d", i + 1);
        TrialSeed ts{seed, "toygen", buf};
        Rng rng(ts.derive());
        TrialEntry e;
        e.utterance_id = buf;
        e.label = Label::Real;
        set.trials.entries.push_back(std::move(e));
        set.audio.push_back(synth_toy_waveform(rng, false));
    }
    for (int i = 0; i < n_fake; ++i) {
        std::snprintf(buf, sizeof(buf), "TOY_F_%04d", i + 1);
        TrialSeed ts{seed, "toygen", buf};
        Rng rng(ts.derive());
        TrialEntry e;
        e.utterance_id = buf;
        e.label = Label::Fake;
        e.attack_tag = "A01";
        set.trials.entries.push_back(std::move(e));
        set.audio.push_back(synth_toy_waveform(rng, true));
    }
    return set;
}

void write_toy_set(const ToySet& set, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream proto(dir / "protocol.txt");
    if (!proto) throw IoFailure("cannot write protocol under " + dir.string());
    for (std::size_t i = 0; i < set.trials.entries.size(); ++i) {
        const TrialEntry& e = set.trials.entries[i];
        write_pcm(set.audio[i], dir / (e.utterance_id + ".wav"), PcmBitDepth::Float32);
        proto << "TOYSPK " << e.utterance_id << " - " << (e.attack_tag ? *e.attack_tag : "-")
              << " " << (e.label == Label::Real ? "bonafide" : "spoof") << "\n";
    }
}

} // namespace deepmark
