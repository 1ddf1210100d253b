#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "deepmark/rng.hpp"
#include "deepmark/stft.hpp"
#include "deepmark/waveform.hpp"

namespace deepmark {

enum class ConditionKind {
    None,
    GaussianNoise,
    Musan,
    Rir,
    Quantization,
    Compressor,
    Opus,
    Dac,
    WavTokenizer,
    Clipping,
    Overdrive,
    RandomTrimming,
    Equalizer,
    FrequencyMasking,
    NoiseGate,
    NoiseReduction,
    TimeStretch,
    PitchShift,
};

enum class ConditionGroup { None, Transmission, Manipulation };
enum class SeenCategory { NotApplied, PartiallySeen, Unseen };

const char* condition_name(ConditionKind kind);
std::optional<ConditionKind> condition_from_name(const std::string& name);
ConditionGroup condition_group(ConditionKind kind);

/// Default report grouping: which conditions were similar to some evaluated
/// system's training-time augmentation. Per-system asterisks are configured
/// separately on the adapter.
SeenCategory default_category(ConditionKind kind);

/// All condition kinds in report row order: None, then partially seen
/// (transmission before manipulation), then unseen (same sub-grouping).
const std::array<ConditionKind, 18>& conditions_in_report_order();

/// Paths and commands needed by corpus- or tool-backed conditions. Empty
/// fields fall back to synthetic sources (Musan, Rir) or cause the condition
/// to be skipped (the external-tool codecs and the DNN noise reduction).
struct ConditionResources {
    std::string musan_dir;
    std::string rir_dir;
    std::string opus_tool;
    std::string dac_tool;
    std::string wavtokenizer_tool;
    std::string noise_reduction_tool;
};

struct ConditionSpec {
    ConditionKind kind = ConditionKind::None;
    ConditionResources resources;

    ConditionGroup group() const { return condition_group(kind); }
    SeenCategory category() const { return default_category(kind); }
    std::string id() const { return condition_name(kind); }
};

struct ConditionOutcome {
    Waveform audio;
    nlohmann::json params; // sampled parameters, logged into the run manifest
};

/// Sample the condition's free parameters from the derived trial seed and
/// dispatch. kind=None returns the input untouched. Deterministic: identical
/// (spec, waveform, seed) produce bit-identical audio and params.
ConditionOutcome apply_condition(const ConditionSpec& spec, const Waveform& w,
                                 const TrialSeed& seed);

// --- individual transforms ---------------------------------------------

/// out = w + g*n with g chosen so 10*log10(P_w / P_gn) = snr_db.
Waveform add_gaussian_noise(const Waveform& w, double snr_db, Rng& rng, bool* renormalized = nullptr);

/// Corpus-clip variant: noise is tiled or truncated to length before scaling.
Waveform add_noise_clip(const Waveform& w, const Waveform& noise, double snr_db,
                        bool* renormalized = nullptr);

/// Full convolution truncated to len(w); rir is normalized to unit peak first.
Waveform convolve_rir(const Waveform& w, const Waveform& rir);

Waveform quantize(const Waveform& w, int bits);

/// Feed-forward compressor: one-pole envelope on |x| (attack 5 ms, release
/// 50 ms), hard knee at threshold_db, reduction (level - threshold)*(1 - 1/ratio).
Waveform compress_dynamics(const Waveform& w, double threshold_db, double ratio);

/// Clamp into the [P_lo, P_hi] nearest-rank percentile range of the input.
Waveform clip_percentile(const Waveform& w, double lo_pct = 1.0, double hi_pct = 99.0);

/// Soft-cubic waveshaper; output is recentred and rescaled to the input peak.
Waveform overdrive(const Waveform& w, double gain_db, double colour);

/// Sampled trim bounds: start in [0, len/4], end in [3*len/4, len].
std::pair<std::size_t, std::size_t> trim_bounds(std::size_t len, Rng& rng);
Waveform trim_random(const Waveform& w, Rng& rng);

/// Cascade of 7 peaking biquads at {125,250,500,1000,2000,4000,6000} Hz, Q=1.
Waveform equalize(const Waveform& w, const std::array<double, 7>& gains_db);

/// Zero n_bins distinct STFT rows chosen without replacement, then invert.
Waveform mask_frequencies(const Waveform& w, int n_bins, Rng& rng, const StftConfig& cfg = {});

/// Median-quantile spectral gate: threshold from the quietest 10% of frames,
/// 40 dB attenuation below it, raised-cosine smoothing of the gain mask.
Waveform noise_gate(const Waveform& w, const StftConfig& cfg = {});

/// Phase-vocoder stretch; output length = round(len / rate) (pitch preserved).
Waveform time_stretch(const Waveform& w, double rate, const StftConfig& cfg = {});

/// Phase-vocoder stretch plus resampling; duration preserved exactly, every
/// frequency mapped to f * 2^(semitones/12).
Waveform pitch_shift(const Waveform& w, double semitones, const StftConfig& cfg = {});

/// Synthetic fallbacks used when no corpus is configured.
Waveform synth_pink_noise(std::size_t len, int rate, Rng& rng);
Waveform synth_exp_decay_rir(int rate, Rng& rng);

} // namespace deepmark
