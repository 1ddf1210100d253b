#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "deepmark/message.hpp"
#include "deepmark/watermark.hpp"
#include "deepmark/waveform.hpp"

namespace deepmark {

/// Sign function over message bits: q(1) = +1, q(0) = -1.
inline int sign_q(int bit) { return bit ? +1 : -1; }

/// Bit-score fusion into one higher-is-real detection score:
///   s = (1/L) * sum_l ( s_l * q(m_real,l) - s_l * q(m_fake,l) )
/// Bits where the two messages agree contribute nothing.
double fuse_score(const BitScores& bs, const MessagePair& pair);

/// Trivial passive scorer: negative spectral flatness of the mean magnitude
/// spectrum. Exercises the passive code path; makes no detection claims.
/// All-zero input maps to the sentinel score 0.
double builtin_baseline_score(const Waveform& w);

/// Watermark-system trial score: detect bits, fuse against the pair.
double score_watermark_trial(const Waveform& w, const MessagePair& pair,
                             const WatermarkConfig& cfg);

struct ScoreFile {
    std::map<std::string, double> scores;
    std::vector<std::string> warnings; // duplicate-id notes
};

/// Parse `<utt_id> <score>` lines. Duplicates: last one wins with a warning.
ScoreFile read_score_file(const std::filesystem::path& path);

enum class AdapterKind { WatermarkReference, ExternalScorer, ScoreFileKind, BuiltinBaseline };
enum class Polarity { HigherIsReal, HigherIsFake };

/// Flip the score when the system declares higher-is-fake, so everything
/// downstream sees the higher-favors-real convention.
inline double apply_polarity(double score, Polarity p) {
    return p == Polarity::HigherIsReal ? score : -score;
}

/// External scorer invocation: `scorer <manifest.txt> <scores.txt>` where the
/// manifest lists `<audio_path> <utt_id>` per line and the tool writes the
/// score-file format. Returns the parsed scores.
ScoreFile run_external_scorer(const std::string& command,
                              const std::vector<std::pair<std::filesystem::path, std::string>>&
                                  manifest_entries);

} // namespace deepmark
