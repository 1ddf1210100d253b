#pragma once

#include <string>
#include <vector>

#include "deepmark/waveform.hpp"

namespace deepmark {

/// Run an external codec/enhancement tool over the waveform.
///
/// Contract: `tool <in.wav> <out.wav> [args...]` where in.wav is 16 kHz mono
/// 16-bit PCM; the tool must write a PCM WAVE file and exit 0. The output is
/// read back, resampled to the input rate if needed, and trimmed or
/// zero-padded to the input length to absorb codec pre-skip or delay.
Waveform external_condition(const Waveform& w, const std::string& tool,
                            const std::vector<std::string>& extra_args);

} // namespace deepmark
