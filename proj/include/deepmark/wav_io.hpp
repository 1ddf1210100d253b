#pragma once

#include <filesystem>

#include "deepmark/waveform.hpp"

namespace deepmark {

enum class PcmBitDepth { Int16, Float32 };

/// Read a RIFF/WAVE file holding linear PCM (16-bit int or 32-bit float).
/// Multichannel input is reduced to its first channel. Integer samples are
/// normalized by 2^(bits-1), so int16 32767 reads as 32767/32768.
Waveform read_pcm(const std::filesystem::path& path);

/// Write a waveform as RIFF/WAVE. The 16-bit path clamps to [-1, 32767/32768]
/// then rounds to nearest; the float path is lossless.
void write_pcm(const Waveform& w, const std::filesystem::path& path,
               PcmBitDepth depth = PcmBitDepth::Float32);

} // namespace deepmark
