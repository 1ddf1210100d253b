#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace deepmark {

// FNV-1a, 64-bit. Used for per-trial seed derivation and cache keys; the
// exact constants are part of the reproducibility contract.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= static_cast<unsigned char>(v >> (8 * i));
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Identifies one (condition, utterance) draw within a run. The derived
/// stream seed depends only on the three fields, never on scheduling order.
struct TrialSeed {
    std::uint64_t master_seed = 0;
    std::string condition_id;
    std::string utterance_id;

    std::uint64_t derive() const {
        std::uint64_t h = fnv1a64_u64(master_seed, 0xcbf29ce484222325ull);
        h = fnv1a64(condition_id, h);
        h = fnv1a64("\x1f", h);
        h = fnv1a64(utterance_id, h);
        return h;
    }
};

/// splitmix64 stream. Self-contained so that sampled parameters are
/// bit-identical across platforms and standard-library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    /// Pick one element index out of n.
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    /// Standard normal via Box-Muller (pairs cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace deepmark
