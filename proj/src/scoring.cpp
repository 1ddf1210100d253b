#include "deepmark/scoring.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "deepmark/stft.hpp"

namespace deepmark {

double fuse_score(const BitScores& bs, const MessagePair& pair) {
    if (pair.m_real.size() != pair.m_fake.size())
        throw LengthMismatch("fuse_score: message pair lengths differ");
    if (bs.size() != pair.size())
        throw LengthMismatch("fuse_score: bit scores do not match message length " +
                             std::to_string(pair.size()));
    double acc = 0.0;
    for (std::size_t l = 0; l < bs.size(); ++l) {
        acc += bs.values[l] * sign_q(pair.m_real.bits[l]) -
               bs.values[l] * sign_q(pair.m_fake.bits[l]);
    }
    return acc / static_cast<double>(bs.size());
}

double builtin_baseline_score(const Waveform& w) {
    require_nonempty(w, "builtin_baseline_score");
    if (w.rms() <= 0.0) return 0.0;

    const Spectrogram s = stft(w);
    std::vector<double> mean_mag(static_cast<std::size_t>(s.num_bins), 0.0);
    for (int t = 0; t < s.num_frames; ++t)
        for (int k = 0; k < s.num_bins; ++k)
            mean_mag[static_cast<std::size_t>(k)] += std::abs(s.at(t, k));

    constexpr double kEps = 1e-12;
    double log_acc = 0.0;
    double lin_acc = 0.0;
    for (double m : mean_mag) {
        const double v = m / s.num_frames;
        log_acc += std::log(v + kEps);
        lin_acc += v;
    }
    const double geo = std::exp(log_acc / static_cast<double>(mean_mag.size()));
    const double arith = lin_acc / static_cast<double>(mean_mag.size());
    const double flatness = geo / (arith + kEps);
    return -flatness;
}

double score_watermark_trial(const Waveform& w, const MessagePair& pair,
                             const WatermarkConfig& cfg) {
    return fuse_score(detect_bits(w, pair.size(), cfg), pair);
}

ScoreFile read_score_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open score file " + path.string());

    ScoreFile out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string utt, score_text;
        if (!(fields >> utt)) continue; // blank line
        if (!(fields >> score_text))
            throw ParseFailure("score file line " + std::to_string(line_no) +
                               ": expected `<utt_id> <score>`");
        std::size_t used = 0;
        double score = 0.0;
        try {
            score = std::stod(score_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != score_text.size())
            throw ParseFailure("score file line " + std::to_string(line_no) +
                               ": malformed score '" + score_text + "'");
        if (out.scores.count(utt))
            out.warnings.push_back("duplicate score for " + utt + " at line " +
                                   std::to_string(line_no) + "; last value wins");
        out.scores[utt] = score;
    }
    return out;
}

ScoreFile run_external_scorer(
    const std::string& command,
    const std::vector<std::pair<std::filesystem::path, std::string>>& manifest_entries) {
    if (command.empty()) throw AdapterFailure("external scorer: empty command");

    static std::atomic<std::uint64_t> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("deepmark_scorer_" + std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    const auto manifest_path = dir / "manifest.txt";
    const auto scores_path = dir / "scores.txt";
    {
        std::ofstream manifest(manifest_path);
        for (const auto& [path, utt] : manifest_entries)
            manifest << path.string() << " " << utt << "\n";
    }

    const std::string cmd =
        command + " '" + manifest_path.string() + "' '" + scores_path.string() + "'";
    const int status = std::system(cmd.c_str());
    if (status != 0) {
        std::filesystem::remove_all(dir);
        throw AdapterFailure("external scorer exited with status " + std::to_string(status));
    }
    ScoreFile out = read_score_file(scores_path);
    std::filesystem::remove_all(dir);
    return out;
}

} // namespace deepmark
