#include "deepmark/stft.hpp"

#include <cmath>

namespace deepmark {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Reflective index without repeating the edge sample: ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
// Degenerates to clamping for single-sample inputs.
std::size_t reflect_index(long long i, long long n) {
    if (n == 1) return 0;
    const long long period = 2 * (n - 1);
    long long m = i % period;
    if (m < 0) m += period;
    if (m >= n) m = period - m;
    return static_cast<std::size_t>(m);
}

} // namespace

std::vector<double> hann_window(int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
    return w;
}

void fft_radix2(std::vector<std::complex<double>>& buf, bool inverse) {
    const std::size_t n = buf.size();
    if (n <= 1) return;
    if (!is_pow2(static_cast<int>(n)))
        throw InconsistentShape("fft size must be a power of two, got " + std::to_string(n));

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(buf[i], buf[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = buf[i + k];
                const std::complex<double> v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& c : buf) c *= inv_n;
    }
}

Spectrogram stft(const Waveform& w, const StftConfig& cfg) {
    require_nonempty(w, "stft");
    if (cfg.fft_size <= 0 || cfg.fft_size % 2 != 0 || !is_pow2(cfg.fft_size))
        throw InconsistentShape("fft_size must be a positive power of two");
    if (cfg.hop <= 0 || cfg.hop > cfg.fft_size)
        throw InconsistentShape("hop must be in (0, fft_size]");

    const long long n = static_cast<long long>(w.size());
    const int half = cfg.fft_size / 2;
    const int num_frames = static_cast<int>((n + cfg.hop - 1) / cfg.hop);
    const std::vector<double> window = hann_window(cfg.fft_size);

    Spectrogram s;
    s.config = cfg;
    s.num_frames = num_frames;
    s.num_bins = cfg.num_bins();
    s.original_length = w.size();
    s.sample_rate_hz = w.sample_rate_hz;
    s.data.resize(static_cast<std::size_t>(num_frames) * s.num_bins);

    std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.fft_size));
    for (int t = 0; t < num_frames; ++t) {
        const long long start = static_cast<long long>(t) * cfg.hop - half;
        for (int i = 0; i < cfg.fft_size; ++i) {
            const long long src = start + i;
            const double v = (src >= 0 && src < n) ? w.samples[static_cast<std::size_t>(src)]
                                                   : w.samples[reflect_index(src, n)];
            buf[static_cast<std::size_t>(i)] = window[static_cast<std::size_t>(i)] * v;
        }
        fft_radix2(buf, false);
        for (int k = 0; k < s.num_bins; ++k) s.at(t, k) = buf[static_cast<std::size_t>(k)];
    }
    return s;
}

Waveform istft(const Spectrogram& s) {
    const StftConfig& cfg = s.config;
    if (s.num_bins != cfg.num_bins() ||
        s.data.size() != static_cast<std::size_t>(s.num_frames) * s.num_bins)
        throw InconsistentShape("spectrogram shape does not match its config");
    if (s.num_frames == 0) throw InconsistentShape("spectrogram has no frames");

    const int half = cfg.fft_size / 2;
    const std::vector<double> window = hann_window(cfg.fft_size);
    const std::size_t padded_len =
        static_cast<std::size_t>(s.num_frames - 1) * cfg.hop + cfg.fft_size;

    std::vector<double> acc(padded_len, 0.0);
    std::vector<double> env(padded_len, 0.0);
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.fft_size));

    for (int t = 0; t < s.num_frames; ++t) {
        for (int k = 0; k < s.num_bins; ++k) buf[static_cast<std::size_t>(k)] = s.at(t, k);
        for (int k = s.num_bins; k < cfg.fft_size; ++k)
            buf[static_cast<std::size_t>(k)] = std::conj(s.at(t, cfg.fft_size - k));
        fft_radix2(buf, true);
        const std::size_t off = static_cast<std::size_t>(t) * cfg.hop;
        for (int i = 0; i < cfg.fft_size; ++i) {
            const double wi = window[static_cast<std::size_t>(i)];
            acc[off + i] += wi * buf[static_cast<std::size_t>(i)].real();
            env[off + i] += wi * wi;
        }
    }

    Waveform out;
    out.sample_rate_hz = s.sample_rate_hz;
    out.samples.assign(s.original_length, 0.0);
    for (std::size_t i = 0; i < s.original_length; ++i) {
        const std::size_t p = i + static_cast<std::size_t>(half);
        if (p < padded_len && env[p] > 1e-12) out.samples[i] = acc[p] / env[p];
    }
    return out;
}

} // namespace deepmark
