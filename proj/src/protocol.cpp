#include "deepmark/protocol.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace deepmark {

TrialList parse_cm_protocol(std::istream& in) {
    TrialList out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::vector<std::string> f;
        std::string tok;
        while (fields >> tok) f.push_back(tok);
        if (f.empty()) continue;
        if (f.size() < 5)
            throw ParseFailure("protocol line " + std::to_string(line_no) +
                               ": expected at least 5 fields, got " + std::to_string(f.size()));
        const std::string& utt = f[1];
        const std::string& attack = f[3];
        const std::string& key = f[4];

        Label label;
        if (key == "bonafide") label = Label::Real;
        else if (key == "spoof") label = Label::Fake;
        else
            throw ParseFailure("protocol line " + std::to_string(line_no) + ": unknown key '" +
                               key + "' (expected bonafide or spoof)");

        if (!seen.insert(utt).second)
            throw DuplicateUtterance("protocol line " + std::to_string(line_no) +
                                     ": duplicate utterance " + utt);

        TrialEntry e;
        e.utterance_id = utt;
        e.label = label;
        if (attack != "-") e.attack_tag = attack;
        out.entries.push_back(std::move(e));
    }
    return out;
}

TrialList parse_cm_protocol_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open protocol file " + path.string());
    return parse_cm_protocol(in);
}

BoundTrials bind_audio(const TrialList& trials, const std::filesystem::path& audio_root,
                       const std::string& extension, MissingAudioPolicy policy) {
    BoundTrials out;
    for (const TrialEntry& e : trials.entries) {
        std::filesystem::path p = audio_root / (e.utterance_id + "." + extension);
        if (std::filesystem::exists(p)) {
            TrialEntry bound = e;
            bound.audio_path = p;
            out.trials.entries.push_back(std::move(bound));
        } else if (policy == MissingAudioPolicy::Fail) {
            throw MissingAudio("no audio for utterance " + e.utterance_id + " under " +
                               audio_root.string());
        } else {
            out.skipped.push_back(e.utterance_id);
        }
    }
    return out;
}

} // namespace deepmark
