// deepmark command-line front end: full evaluations, single-condition
// debugging, the reference watermarker, EER computation, and toy datasets.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "deepmark/harness.hpp"
#include "deepmark/wav_io.hpp"

using namespace deepmark;

namespace {

int cmd_run(const std::string& config_path, int jobs_override,
            const std::string& output_override) {
    RunConfig cfg = load_run_config(config_path);
    if (jobs_override > 0) cfg.parallelism = jobs_override;
    if (!output_override.empty()) cfg.output_dir = output_override;

    const EvalReport report = run_eval(cfg);
    const auto written = write_outputs(report, cfg);

    std::cout << render_report(report, ReportFormat::Markdown) << "\n";
    for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
    return 0;
}

int cmd_attack(const std::string& in_path, const std::string& out_path,
               const std::string& condition, std::uint64_t seed, const std::string& utt,
               const ConditionResources& res) {
    const auto kind = condition_from_name(condition);
    if (!kind) {
        std::cerr << "unknown condition '" << condition << "'. Known:";
        for (ConditionKind k : conditions_in_report_order()) std::cerr << " " << condition_name(k);
        std::cerr << "\n";
        return 2;
    }
    Waveform w = read_pcm(in_path);
    if (w.sample_rate_hz != 16000) {
        std::cerr << "input must be 16 kHz (got " << w.sample_rate_hz << ")\n";
        return 2;
    }
    ConditionSpec spec;
    spec.kind = *kind;
    spec.resources = res;
    const ConditionOutcome out = apply_condition(spec, w, TrialSeed{seed, spec.id(), utt});
    write_pcm(out.audio, out_path, PcmBitDepth::Int16);
    std::cout << "applied " << condition << ", parameters: " << out.params.dump() << "\n";
    return 0;
}

int cmd_embed(const std::string& in_path, const std::string& out_path, const std::string& hex,
              double alpha) {
    Waveform w = read_pcm(in_path);
    if (w.sample_rate_hz != 16000) {
        std::cerr << "input must be 16 kHz (got " << w.sample_rate_hz << ")\n";
        return 2;
    }
    WatermarkConfig cfg;
    if (alpha > 0.0) cfg.alpha = alpha;
    const Message m = Message::from_hex(hex);
    write_pcm(embed(w, m, cfg), out_path, PcmBitDepth::Int16);
    std::cout << "embedded " << m.size() << "-bit message " << hex << "\n";
    return 0;
}

int cmd_detect(const std::string& in_path, const std::string& message_hex,
               const std::string& real_hex, const std::string& fake_hex, int bits,
               double alpha) {
    Waveform w = read_pcm(in_path);
    if (w.sample_rate_hz != 16000) {
        std::cerr << "input must be 16 kHz (got " << w.sample_rate_hz << ")\n";
        return 2;
    }
    WatermarkConfig cfg;
    if (alpha > 0.0) cfg.alpha = alpha;

    std::size_t n_bits = static_cast<std::size_t>(bits);
    if (!message_hex.empty()) n_bits = Message::from_hex(message_hex).size();
    else if (!real_hex.empty()) n_bits = Message::from_hex(real_hex).size();

    const BitScores s = detect_bits(w, n_bits, cfg);
    std::cout << "bit scores:";
    for (double v : s.values) std::printf(" %+.4f", v);
    std::cout << "\ndecoded bits:";
    for (double v : s.values) std::cout << " " << (v > 0.0 ? 1 : 0);
    std::cout << "\n";
    if (!message_hex.empty()) {
        const Message m = Message::from_hex(message_hex);
        std::printf("bit accuracy vs %s: %.4f\n", message_hex.c_str(), bit_accuracy(s, m));
    }
    if (!real_hex.empty() && !fake_hex.empty()) {
        const MessagePair pair{Message::from_hex(real_hex), Message::from_hex(fake_hex)};
        std::printf("fused score (higher favors real): %+.6f\n", fuse_score(s, pair));
    }
    return 0;
}

int cmd_eer(const std::string& score_path, const std::string& protocol_path) {
    const ScoreFile sf = read_score_file(score_path);
    for (const auto& warning : sf.warnings) std::cerr << "warning: " << warning << "\n";
    const TrialList trials = parse_cm_protocol_file(protocol_path);

    std::vector<ScoredTrial> scored;
    std::size_t missing = 0;
    for (const TrialEntry& e : trials.entries) {
        const auto it = sf.scores.find(e.utterance_id);
        if (it == sf.scores.end()) {
            ++missing;
            continue;
        }
        scored.push_back({e.utterance_id, e.label, it->second});
    }
    if (missing > 0)
        std::cerr << "warning: " << missing << " protocol trials had no score and were dropped\n";

    const EerResult r = estimate_eer(scored);
    std::printf("EER: %.4f%%  (threshold %.6g, P_FA %.4f, P_FR %.4f, %zu trials)\n",
                100.0 * r.eer, r.tau_star, r.p_fa_at_tau, r.p_fr_at_tau, scored.size());
    return 0;
}

int cmd_gen_toys(const std::string& dir, int n_real, int n_fake, std::uint64_t seed) {
    const ToySet set = synth_toy_trials(n_real, n_fake, seed);
    write_toy_set(set, dir);
    std::cout << "wrote " << set.trials.size() << " fixtures and protocol.txt under " << dir
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deepmark: joint evaluation of passive deepfake detectors and proactive "
                 "watermarking under one metric and one battery of conditions"};
    app.require_subcommand(1);

    // run
    std::string config_path, output_override;
    int jobs_override = 0;
    auto* run = app.add_subcommand("run", "full evaluation from a JSON config");
    run->add_option("config", config_path, "config file (JSON)")->required();
    run->add_option("--jobs", jobs_override, "override the parallelism cap");
    run->add_option("--output", output_override, "override the output directory");

    // attack
    std::string in_path, out_path, condition, utt = "UTT";
    std::uint64_t seed = 0;
    ConditionResources res;
    auto* attack = app.add_subcommand("attack", "apply one condition to a waveform");
    attack->add_option("input", in_path, "input wav (16 kHz mono)")->required();
    attack->add_option("output", out_path, "output wav")->required();
    attack->add_option("--condition", condition, "condition name, e.g. GaussianNoise")->required();
    attack->add_option("--seed", seed, "master seed for parameter sampling");
    attack->add_option("--utt", utt, "utterance id entering the seed derivation");
    attack->add_option("--musan-dir", res.musan_dir, "noise corpus directory");
    attack->add_option("--rir-dir", res.rir_dir, "impulse-response corpus directory");
    attack->add_option("--opus-tool", res.opus_tool, "external Opus round-trip tool");
    attack->add_option("--dac-tool", res.dac_tool, "external DAC round-trip tool");
    attack->add_option("--wavtokenizer-tool", res.wavtokenizer_tool,
                       "external WavTokenizer round-trip tool");
    attack->add_option("--noise-reduction-tool", res.noise_reduction_tool,
                       "external speech-enhancement tool");

    // embed / detect
    std::string message_hex, real_hex, fake_hex;
    double alpha = 0.0;
    int bits = 16;
    auto* embed_cmd = app.add_subcommand("embed", "embed a reference watermark");
    embed_cmd->add_option("input", in_path, "input wav (16 kHz mono)")->required();
    embed_cmd->add_option("output", out_path, "output wav")->required();
    embed_cmd->add_option("--message", message_hex, "message as hex digits (4 bits each)")
        ->required();
    embed_cmd->add_option("--alpha", alpha, "modulation depth override");

    auto* detect_cmd = app.add_subcommand("detect", "detect reference watermark bit scores");
    detect_cmd->add_option("input", in_path, "input wav (16 kHz mono)")->required();
    detect_cmd->add_option("--bits", bits, "message length when no message given");
    detect_cmd->add_option("--message", message_hex, "ground-truth message for bit accuracy");
    detect_cmd->add_option("--real", real_hex, "real-message hex for score fusion");
    detect_cmd->add_option("--fake", fake_hex, "fake-message hex for score fusion");
    detect_cmd->add_option("--alpha", alpha, "modulation depth override");

    // eer
    std::string score_path, protocol_path;
    auto* eer_cmd = app.add_subcommand("eer", "EER from a score file and a protocol");
    eer_cmd->add_option("scores", score_path, "score file: `<utt_id> <score>` lines")->required();
    eer_cmd->add_option("protocol", protocol_path, "five-field protocol file")->required();

    // gen-toys
    std::string toy_dir;
    int n_real = 10, n_fake = 10;
    std::uint64_t toy_seed = 1;
    auto* toys = app.add_subcommand("gen-toys", "generate a self-contained toy dataset");
    toys->add_option("dir", toy_dir, "output directory")->required();
    toys->add_option("--real", n_real, "number of real fixtures");
    toys->add_option("--fake", n_fake, "number of fake fixtures");
    toys->add_option("--seed", toy_seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, jobs_override, output_override);
        if (attack->parsed()) return cmd_attack(in_path, out_path, condition, seed, utt, res);
        if (embed_cmd->parsed()) return cmd_embed(in_path, out_path, message_hex, alpha);
        if (detect_cmd->parsed())
            return cmd_detect(in_path, message_hex, real_hex, fake_hex, bits, alpha);
        if (eer_cmd->parsed()) return cmd_eer(score_path, protocol_path);
        if (toys->parsed()) return cmd_gen_toys(toy_dir, n_real, n_fake, toy_seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
