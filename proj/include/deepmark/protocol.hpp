#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "deepmark/errors.hpp"
#include "deepmark/rng.hpp"

namespace deepmark {

enum class Label { Real, Fake };

inline const char* label_name(Label l) { return l == Label::Real ? "real" : "fake"; }

struct TrialEntry {
    std::string utterance_id;
    Label label = Label::Real;
    std::optional<std::string> attack_tag;
    std::optional<std::filesystem::path> audio_path; // bound by build_manifest
};

struct TrialList {
    std::vector<TrialEntry> entries;
    std::size_t size() const { return entries.size(); }
};

/// Five-field countermeasure protocol grammar:
///   speaker_id utt_id field3 attack_id key
/// key is "bonafide" (-> real) or "spoof" (-> fake); attack_id "-" means none.
TrialList parse_cm_protocol(std::istream& in);
TrialList parse_cm_protocol_file(const std::filesystem::path& path);

enum class MissingAudioPolicy { Fail, SkipWithWarning };

/// Trials bound to audio files plus the ones skipped under the skip policy.
struct BoundTrials {
    TrialList trials;                  // entries with audio_path filled
    std::vector<std::string> skipped;  // utterance ids without audio
};

BoundTrials bind_audio(const TrialList& trials, const std::filesystem::path& audio_root,
                       const std::string& extension, MissingAudioPolicy policy);

} // namespace deepmark
