#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepmark/conditions.hpp"
#include "deepmark/metrics.hpp"
#include "deepmark/protocol.hpp"
#include "deepmark/scoring.hpp"
#include "deepmark/toygen.hpp"

namespace deepmark {

struct SystemSpec {
    std::string name;
    AdapterKind kind = AdapterKind::BuiltinBaseline;
    Polarity polarity = Polarity::HigherIsReal;
    std::set<std::string> partially_seen; // condition ids rendered with an asterisk

    // watermark_reference
    WatermarkConfig watermark;
    Message message_real;
    Message message_fake;

    // score_file
    std::filesystem::path score_path;

    // external_scorer
    std::string scorer_command;
};

struct DatasetSpec {
    bool use_toy = false;
    int toy_real = 0;
    int toy_fake = 0;
    std::filesystem::path protocol_path;
    std::filesystem::path audio_root;
    std::string audio_ext = "wav";
    MissingAudioPolicy missing = MissingAudioPolicy::Fail;
};

struct RunConfig {
    std::uint64_t master_seed = 0;
    DatasetSpec dataset;
    std::vector<SystemSpec> systems;
    std::vector<ConditionKind> conditions; // None is always included
    ConditionResources resources;
    std::filesystem::path output_dir = "deepmark_out";
    int parallelism = 4;
    bool cache = true;
    std::vector<std::string> report_formats = {"markdown", "csv", "json"};
};

/// Parse + validate a config JSON document (see README for the schema).
RunConfig parse_run_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

struct CellResult {
    ConditionKind condition = ConditionKind::None;
    bool evaluated = false;
    std::string skip_reason;
    double eer = 0.0;
    double tau_star = 0.0;
    int n_scored = 0;
    int n_skipped = 0;
    bool partially_seen = false;
    std::optional<double> mean_bit_accuracy; // watermark systems only
};

struct SystemReport {
    std::string name;
    std::vector<CellResult> cells; // report row order
    double average_wo_none = 0.0;  // mean EER over evaluated non-None cells
    int average_count = 0;
};

struct EvalReport {
    std::vector<SystemReport> systems;
    nlohmann::json manifest; // config echo + per-trial sampled parameters
};

/// Full evaluation. Watermark systems embed first, the condition is applied
/// to the watermarked waveform, then bit detection and score fusion produce
/// the trial score; passive systems score conditioned raw audio.
/// Deterministic for a fixed master seed at any parallelism.
EvalReport run_eval(const RunConfig& cfg);

enum class ReportFormat { Markdown, Csv, Json };

std::string render_report(const EvalReport& report, ReportFormat format);

/// Stable content key for cached conditioned audio.
std::string cache_key(const std::string& condition_id, const std::string& utterance_id,
                      std::uint64_t master_seed);

/// Convenience: run, render all requested formats, write the manifest.
/// Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const EvalReport& report, const RunConfig& cfg);

} // namespace deepmark
