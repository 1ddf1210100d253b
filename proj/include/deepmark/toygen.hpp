#pragma once

#include <cstdint>
#include <filesystem>

#include "deepmark/protocol.hpp"
#include "deepmark/waveform.hpp"

namespace deepmark {

/// Self-contained desk-scale dataset: voiced-buzz + breath-noise fixtures
/// labeled real, and variants with different excitation statistics labeled
/// fake. Deterministic in (counts, seed). Exists for plumbing and watermark
/// round trips, not detector realism.
struct ToySet {
    TrialList trials;
    std::vector<Waveform> audio; // parallel to trials.entries
};

/// One fixture, 1-3 s at 16 kHz, RMS >= 0.01.
Waveform synth_toy_waveform(Rng& rng, bool fake);

ToySet synth_toy_trials(int n_real, int n_fake, std::uint64_t seed);

/// Write a toy set as <dir>/<utt_id>.wav (32-bit float) plus a protocol file
/// <dir>/protocol.txt in the five-field grammar.
void write_toy_set(const ToySet& set, const std::filesystem::path& dir);

} // namespace deepmark
