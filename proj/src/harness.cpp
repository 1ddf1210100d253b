#include "deepmark/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "deepmark/resample.hpp"
#include "deepmark/wav_io.hpp"

namespace deepmark {

namespace {

using nlohmann::json;

const char* kind_name(AdapterKind k) {
    switch (k) {
        case AdapterKind::WatermarkReference: return "watermark_reference";
        case AdapterKind::ExternalScorer: return "external_scorer";
        case AdapterKind::ScoreFileKind: return "score_file";
        case AdapterKind::BuiltinBaseline: return "builtin_baseline";
    }
    return "unknown";
}

AdapterKind kind_from_name(const std::string& s) {
    if (s == "watermark_reference") return AdapterKind::WatermarkReference;
    if (s == "external_scorer") return AdapterKind::ExternalScorer;
    if (s == "score_file") return AdapterKind::ScoreFileKind;
    if (s == "builtin_baseline") return AdapterKind::BuiltinBaseline;
    throw ConfigInvalid("unknown system kind '" + s +
                        "' (expected watermark_reference, external_scorer, score_file, or "
                        "builtin_baseline)");
}

bool needs_tool(ConditionKind c) {
    return c == ConditionKind::Opus || c == ConditionKind::Dac ||
           c == ConditionKind::WavTokenizer || c == ConditionKind::NoiseReduction;
}

const std::string& tool_for(ConditionKind c, const ConditionResources& r) {
    static const std::string empty;
    switch (c) {
        case ConditionKind::Opus: return r.opus_tool;
        case ConditionKind::Dac: return r.dac_tool;
        case ConditionKind::WavTokenizer: return r.wavtokenizer_tool;
        case ConditionKind::NoiseReduction: return r.noise_reduction_tool;
        default: return empty;
    }
}

struct LoadedTrial {
    TrialEntry entry;
    Waveform audio;
};

struct TrialOutcome {
    bool scored = false;
    std::string skip_reason;
    double score = 0.0;
    double bit_accuracy = -1.0; // watermark systems only
    json params;                // sampled condition parameters
};

int effective_parallelism(const RunConfig& cfg) {
    if (const char* env = std::getenv("DEEPMARK_JOBS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1, cfg.parallelism);
}

// Run fn(i) for i in [0, n) on up to `jobs` worker threads. Results land in
// caller-owned slots, so scheduling order cannot affect the outputs.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

std::string cache_key(const std::string& condition_id, const std::string& utterance_id,
                      std::uint64_t master_seed) {
    std::uint64_t h = fnv1a64_u64(master_seed, 0xcbf29ce484222325ull);
    h = fnv1a64(condition_id, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(utterance_id, h);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return condition_id + "_" + utterance_id + "_" + buf;
}

namespace {
RunConfig parse_run_config_impl(const json& doc, const std::filesystem::path& base_dir);
} // namespace

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    try {
        return parse_run_config_impl(doc, base_dir);
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config field has the wrong type: ") + e.what());
    }
}

namespace {
RunConfig parse_run_config_impl(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigInvalid("config root must be a JSON object");
    RunConfig cfg;

    const auto resolve = [&](const std::string& p) { return base_dir / p; };

    if (!doc.contains("master_seed") || !doc["master_seed"].is_number())
        throw ConfigInvalid("config needs a numeric 'master_seed'");
    cfg.master_seed = doc["master_seed"].get<std::uint64_t>();

    if (!doc.contains("dataset") || !doc["dataset"].is_object())
        throw ConfigInvalid("config needs a 'dataset' object");
    const json& ds = doc["dataset"];
    if (ds.contains("toy")) {
        cfg.dataset.use_toy = true;
        cfg.dataset.toy_real = ds["toy"].value("n_real", 0);
        cfg.dataset.toy_fake = ds["toy"].value("n_fake", 0);
        if (cfg.dataset.toy_real < 1 || cfg.dataset.toy_fake < 1)
            throw ConfigInvalid("dataset.toy needs n_real >= 1 and n_fake >= 1");
    } else {
        if (!ds.contains("protocol") || !ds.contains("audio_root"))
            throw ConfigInvalid("dataset needs either 'toy' or 'protocol' + 'audio_root'");
        cfg.dataset.protocol_path = resolve(ds["protocol"].get<std::string>());
        cfg.dataset.audio_root = resolve(ds["audio_root"].get<std::string>());
        cfg.dataset.audio_ext = ds.value("audio_ext", "wav");
        const std::string policy = ds.value("missing_audio", "fail");
        if (policy == "fail") cfg.dataset.missing = MissingAudioPolicy::Fail;
        else if (policy == "skip") cfg.dataset.missing = MissingAudioPolicy::SkipWithWarning;
        else throw ConfigInvalid("dataset.missing_audio must be 'fail' or 'skip'");
    }

    if (!doc.contains("systems") || !doc["systems"].is_array() || doc["systems"].empty())
        throw ConfigInvalid("config needs a non-empty 'systems' array");
    for (const json& s : doc["systems"]) {
        SystemSpec spec;
        if (!s.contains("name")) throw ConfigInvalid("every system needs a 'name'");
        spec.name = s["name"].get<std::string>();
        spec.kind = kind_from_name(s.value("kind", ""));
        const std::string pol = s.value("polarity", "higher_is_real");
        if (pol == "higher_is_real") spec.polarity = Polarity::HigherIsReal;
        else if (pol == "higher_is_fake") spec.polarity = Polarity::HigherIsFake;
        else throw ConfigInvalid("system '" + spec.name + "': unknown polarity '" + pol + "'");

        if (s.contains("partially_seen"))
            for (const json& c : s["partially_seen"]) {
                const std::string id = c.get<std::string>();
                if (!condition_from_name(id))
                    throw ConfigInvalid("system '" + spec.name +
                                        "': unknown partially_seen condition '" + id + "'");
                spec.partially_seen.insert(id);
            }

        if (spec.kind == AdapterKind::WatermarkReference) {
            if (!s.contains("message_real") || !s.contains("message_fake"))
                throw ConfigInvalid("system '" + spec.name +
                                    "': watermark systems need message_real and message_fake "
                                    "(hex strings)");
            spec.message_real = Message::from_hex(s["message_real"].get<std::string>());
            spec.message_fake = Message::from_hex(s["message_fake"].get<std::string>());
            if (spec.message_real.size() != spec.message_fake.size())
                throw ConfigInvalid("system '" + spec.name + "': message lengths differ");
            if (s.contains("alpha")) spec.watermark.alpha = s["alpha"].get<double>();
            if (s.contains("band_lo_hz")) spec.watermark.band_lo_hz = s["band_lo_hz"].get<double>();
            if (s.contains("band_hi_hz")) spec.watermark.band_hi_hz = s["band_hi_hz"].get<double>();
            if (s.contains("band_width_bins"))
                spec.watermark.band_width_bins = s["band_width_bins"].get<int>();
            make_band_plan(spec.watermark, spec.message_real.size(), 16000); // validates
        } else if (spec.kind == AdapterKind::ScoreFileKind) {
            if (!s.contains("path"))
                throw ConfigInvalid("system '" + spec.name + "': score_file systems need 'path'");
            spec.score_path = resolve(s["path"].get<std::string>());
        } else if (spec.kind == AdapterKind::ExternalScorer) {
            if (!s.contains("command"))
                throw ConfigInvalid("system '" + spec.name +
                                    "': external_scorer systems need 'command'");
            spec.scorer_command = s["command"].get<std::string>();
        }
        cfg.systems.push_back(std::move(spec));
    }

    if (doc.contains("conditions") && doc["conditions"].is_array()) {
        for (const json& c : doc["conditions"]) {
            const std::string id = c.get<std::string>();
            const auto kind = condition_from_name(id);
            if (!kind) throw ConfigInvalid("unknown condition '" + id + "'");
            if (std::find(cfg.conditions.begin(), cfg.conditions.end(), *kind) ==
                cfg.conditions.end())
                cfg.conditions.push_back(*kind);
        }
    } else {
        // "all" or absent: the full battery
        for (ConditionKind k : conditions_in_report_order()) cfg.conditions.push_back(k);
    }
    // None is always included
    if (std::find(cfg.conditions.begin(), cfg.conditions.end(), ConditionKind::None) ==
        cfg.conditions.end())
        cfg.conditions.insert(cfg.conditions.begin(), ConditionKind::None);

    if (doc.contains("resources")) {
        const json& r = doc["resources"];
        cfg.resources.musan_dir = r.value("musan_dir", "");
        cfg.resources.rir_dir = r.value("rir_dir", "");
        cfg.resources.opus_tool = r.value("opus_tool", "");
        cfg.resources.dac_tool = r.value("dac_tool", "");
        cfg.resources.wavtokenizer_tool = r.value("wavtokenizer_tool", "");
        cfg.resources.noise_reduction_tool = r.value("noise_reduction_tool", "");
    }

    cfg.output_dir = resolve(doc.value("output_dir", "deepmark_out"));
    cfg.parallelism = doc.value("parallelism", 4);
    if (cfg.parallelism < 1) throw ConfigInvalid("parallelism must be >= 1");
    cfg.cache = doc.value("cache", true);
    if (doc.contains("report_formats")) {
        cfg.report_formats.clear();
        for (const json& f : doc["report_formats"]) {
            const std::string fmt = f.get<std::string>();
            if (fmt != "markdown" && fmt != "csv" && fmt != "json")
                throw ConfigInvalid("unknown report format '" + fmt + "'");
            cfg.report_formats.push_back(fmt);
        }
    }
    return cfg;
}
} // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigInvalid("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_run_config(doc, path.parent_path());
}

EvalReport run_eval(const RunConfig& cfg) {
    const int jobs = effective_parallelism(cfg);

    // --- dataset ---------------------------------------------------------
    std::vector<LoadedTrial> trials;
    std::vector<std::string> dataset_warnings;
    if (cfg.dataset.use_toy) {
        ToySet set = synth_toy_trials(cfg.dataset.toy_real, cfg.dataset.toy_fake,
                                      cfg.master_seed);
        for (std::size_t i = 0; i < set.trials.entries.size(); ++i)
            trials.push_back({set.trials.entries[i], std::move(set.audio[i])});
    } else {
        const TrialList parsed = parse_cm_protocol_file(cfg.dataset.protocol_path);
        BoundTrials bound =
            bind_audio(parsed, cfg.dataset.audio_root, cfg.dataset.audio_ext, cfg.dataset.missing);
        for (const std::string& utt : bound.skipped)
            dataset_warnings.push_back("no audio for " + utt + "; trial dropped");
        for (const TrialEntry& e : bound.trials.entries) {
            Waveform w = read_pcm(*e.audio_path);
            if (w.sample_rate_hz != 16000) w = resample(w, 16000);
            trials.push_back({e, std::move(w)});
        }
    }
    if (trials.empty()) throw ConfigInvalid("dataset resolved to zero trials");

    // --- per-system fixed state -------------------------------------------
    std::vector<ScoreFile> score_files(cfg.systems.size());
    std::vector<std::string> config_warnings = dataset_warnings;
    for (std::size_t si = 0; si < cfg.systems.size(); ++si) {
        const SystemSpec& s = cfg.systems[si];
        if (s.kind == AdapterKind::ScoreFileKind) score_files[si] = read_score_file(s.score_path);
        if (s.kind == AdapterKind::WatermarkReference) {
            const MessagePair pair{s.message_real, s.message_fake};
            if (!pair.bitwise_disjoint())
                config_warnings.push_back(
                    "system '" + s.name +
                    "': message pair is not bit-wise disjoint; agreeing positions waste "
                    "watermark capacity");
        }
    }

    // canonical source of sampled-parameter logs: the first system that
    // actually processes audio
    std::size_t canon_system = cfg.systems.size();
    for (std::size_t si = 0; si < cfg.systems.size(); ++si) {
        if (cfg.systems[si].kind != AdapterKind::ScoreFileKind) {
            canon_system = si;
            break;
        }
    }

    // report grid [system][condition-in-config-order]
    std::vector<std::vector<CellResult>> grid(cfg.systems.size());
    for (auto& row : grid) row.resize(cfg.conditions.size());

    json trial_params = json::object();
    json skipped_log = json::object();

    const std::filesystem::path cache_dir = cfg.output_dir / "cache";
    if (cfg.cache) std::filesystem::create_directories(cache_dir);

    // --- evaluation: conditions outer so the passive cache stays bounded --
    for (std::size_t ci = 0; ci < cfg.conditions.size(); ++ci) {
        const ConditionKind cond = cfg.conditions[ci];
        ConditionSpec spec;
        spec.kind = cond;
        spec.resources = cfg.resources;
        const std::string cond_id = spec.id();

        const bool tool_missing = needs_tool(cond) && tool_for(cond, cfg.resources).empty();

        // shared conditioned audio for passive consumers
        std::unordered_map<std::string, std::pair<Waveform, json>> passive_cache;
        std::mutex cache_mu;
        const auto conditioned_passive = [&](const LoadedTrial& t) {
            const std::string key = cache_key(cond_id, t.entry.utterance_id, cfg.master_seed);
            {
                std::lock_guard<std::mutex> lock(cache_mu);
                const auto it = passive_cache.find(key);
                if (it != passive_cache.end()) return it->second;
            }
            std::pair<Waveform, json> computed;
            const std::filesystem::path cached_file = cache_dir / (key + ".wav");
            bool from_disk = false;
            if (cfg.cache && std::filesystem::exists(cached_file)) {
                computed.first = read_pcm(cached_file);
                computed.second = json{{"condition", cond_id}, {"cache", "disk"}};
                from_disk = true;
            } else {
                TrialSeed seed{cfg.master_seed, cond_id, t.entry.utterance_id};
                ConditionOutcome out = apply_condition(spec, t.audio, seed);
                computed.first = std::move(out.audio);
                computed.second = std::move(out.params);
                if (cfg.cache) {
                    // canonicalize through the cached representation so warm
                    // runs score bit-identical audio
                    for (double& v : computed.first.samples)
                        v = static_cast<double>(static_cast<float>(v));
                }
            }
            if (cfg.cache && !from_disk)
                write_pcm(computed.first, cached_file, PcmBitDepth::Float32);
            std::lock_guard<std::mutex> lock(cache_mu);
            return passive_cache.emplace(key, std::move(computed)).first->second;
        };

        json cond_params = json::object();

        for (std::size_t si = 0; si < cfg.systems.size(); ++si) {
            const SystemSpec& sys = cfg.systems[si];
            CellResult& cell = grid[si][ci];
            cell.condition = cond;
            cell.partially_seen = sys.partially_seen.count(cond_id) > 0;

            if (tool_missing && sys.kind != AdapterKind::ScoreFileKind) {
                cell.evaluated = false;
                cell.skip_reason = "no tool configured for " + cond_id;
                cell.n_skipped = static_cast<int>(trials.size());
                continue;
            }

            std::vector<TrialOutcome> outcomes(trials.size());
            const MessagePair pair{sys.message_real, sys.message_fake};

            const auto run_trial = [&](std::size_t ti) {
                const LoadedTrial& t = trials[ti];
                TrialOutcome& out = outcomes[ti];
                try {
                    switch (sys.kind) {
                        case AdapterKind::WatermarkReference: {
                            const Message& truth =
                                t.entry.label == Label::Real ? sys.message_real : sys.message_fake;
                            const Waveform wm = embed(t.audio, truth, sys.watermark);
                            TrialSeed seed{cfg.master_seed, cond_id, t.entry.utterance_id};
                            ConditionOutcome c = apply_condition(spec, wm, seed);
                            out.params = c.params;
                            const BitScores bits =
                                detect_bits(c.audio, pair.size(), sys.watermark);
                            out.score = apply_polarity(fuse_score(bits, pair), sys.polarity);
                            out.bit_accuracy = bit_accuracy(bits, truth);
                            out.scored = true;
                            break;
                        }
                        case AdapterKind::BuiltinBaseline: {
                            const auto& [audio, params] = conditioned_passive(t);
                            out.params = params;
                            out.score =
                                apply_polarity(builtin_baseline_score(audio), sys.polarity);
                            out.scored = true;
                            break;
                        }
                        case AdapterKind::ScoreFileKind: {
                            const auto& scores = score_files[si].scores;
                            const auto it = scores.find(t.entry.utterance_id);
                            if (it == scores.end())
                                throw MissingScore("no score for " + t.entry.utterance_id +
                                                   " in " + sys.score_path.string());
                            out.score = apply_polarity(it->second, sys.polarity);
                            out.scored = true;
                            break;
                        }
                        case AdapterKind::ExternalScorer: {
                            // phase 1: conditioned audio on disk; scored in batch below
                            const auto& [audio, params] = conditioned_passive(t);
                            (void)audio;
                            out.params = params;
                            break;
                        }
                    }
                } catch (const Error& e) {
                    out.scored = false;
                    out.skip_reason = e.what();
                }
            };
            parallel_for(trials.size(), jobs, run_trial);

            // batch phase for external scorers
            if (sys.kind == AdapterKind::ExternalScorer) {
                std::vector<std::pair<std::filesystem::path, std::string>> manifest;
                for (std::size_t ti = 0; ti < trials.size(); ++ti) {
                    if (!outcomes[ti].skip_reason.empty()) continue;
                    const std::string key =
                        cache_key(cond_id, trials[ti].entry.utterance_id, cfg.master_seed);
                    std::filesystem::path p = cache_dir / (key + ".wav");
                    if (!cfg.cache) {
                        // cache disabled: materialize just for the scorer
                        std::filesystem::create_directories(cache_dir);
                        const auto& [audio, params] = conditioned_passive(trials[ti]);
                        (void)params;
                        write_pcm(audio, p, PcmBitDepth::Float32);
                    }
                    manifest.emplace_back(p, trials[ti].entry.utterance_id);
                }
                try {
                    const ScoreFile scored = run_external_scorer(sys.scorer_command, manifest);
                    for (std::size_t ti = 0; ti < trials.size(); ++ti) {
                        TrialOutcome& out = outcomes[ti];
                        if (!out.skip_reason.empty()) continue;
                        const auto it = scored.scores.find(trials[ti].entry.utterance_id);
                        if (it == scored.scores.end()) {
                            out.skip_reason = "external scorer returned no score";
                            continue;
                        }
                        out.score = apply_polarity(it->second, sys.polarity);
                        out.scored = true;
                    }
                } catch (const Error& e) {
                    for (auto& out : outcomes)
                        if (out.skip_reason.empty() && !out.scored) out.skip_reason = e.what();
                }
            }

            // canonical sampled-parameter log
            if (si == canon_system) {
                for (std::size_t ti = 0; ti < trials.size(); ++ti) {
                    if (!outcomes[ti].params.is_null() && !outcomes[ti].params.empty())
                        cond_params[trials[ti].entry.utterance_id] = outcomes[ti].params;
                }
            }

            // aggregate the cell
            std::vector<ScoredTrial> scored;
            json cell_skips = json::array();
            double acc_sum = 0.0;
            int acc_count = 0;
            for (std::size_t ti = 0; ti < trials.size(); ++ti) {
                const TrialOutcome& out = outcomes[ti];
                if (out.scored) {
                    scored.push_back(
                        {trials[ti].entry.utterance_id, trials[ti].entry.label, out.score});
                    if (out.bit_accuracy >= 0.0) {
                        acc_sum += out.bit_accuracy;
                        ++acc_count;
                    }
                } else {
                    ++cell.n_skipped;
                    cell_skips.push_back(trials[ti].entry.utterance_id + ": " +
                                         (out.skip_reason.empty() ? "not scored"
                                                                  : out.skip_reason));
                }
            }
            cell.n_scored = static_cast<int>(scored.size());
            if (!cell_skips.empty()) skipped_log[sys.name + "/" + cond_id] = cell_skips;
            if (acc_count > 0) cell.mean_bit_accuracy = acc_sum / acc_count;

            bool has_real = false, has_fake = false;
            for (const auto& st : scored) {
                has_real |= st.label == Label::Real;
                has_fake |= st.label == Label::Fake;
            }
            if (!has_real || !has_fake) {
                cell.evaluated = false;
                if (cell.skip_reason.empty())
                    cell.skip_reason = scored.empty() ? "all trials skipped"
                                                      : "one class fully skipped";
                continue;
            }
            const EerResult r = estimate_eer(scored);
            cell.evaluated = true;
            cell.eer = r.eer;
            cell.tau_star = r.tau_star;
        }

        if (!cond_params.empty()) trial_params[cond_id] = std::move(cond_params);
    }

    // --- assemble the report ----------------------------------------------
    EvalReport report;
    for (std::size_t si = 0; si < cfg.systems.size(); ++si) {
        SystemReport sr;
        sr.name = cfg.systems[si].name;

        // rows in canonical report order, restricted to the configured set
        for (ConditionKind kind : conditions_in_report_order()) {
            for (std::size_t ci = 0; ci < cfg.conditions.size(); ++ci) {
                if (cfg.conditions[ci] == kind) {
                    sr.cells.push_back(grid[si][ci]);
                    break;
                }
            }
        }
        double sum = 0.0;
        int count = 0;
        for (const CellResult& c : sr.cells) {
            if (c.condition == ConditionKind::None || !c.evaluated) continue;
            sum += c.eer;
            ++count;
        }
        sr.average_wo_none = count > 0 ? sum / count : 0.0;
        sr.average_count = count;
        report.systems.push_back(std::move(sr));
    }

    // --- manifest -----------------------------------------------------------
    json manifest;
    manifest["master_seed"] = cfg.master_seed;
    if (cfg.dataset.use_toy) {
        manifest["dataset"] = {{"toy", {{"n_real", cfg.dataset.toy_real},
                                        {"n_fake", cfg.dataset.toy_fake}}}};
    } else {
        manifest["dataset"] = {{"protocol", cfg.dataset.protocol_path.string()},
                               {"audio_root", cfg.dataset.audio_root.string()},
                               {"audio_ext", cfg.dataset.audio_ext}};
    }
    json conds = json::array();
    for (ConditionKind c : cfg.conditions) conds.push_back(condition_name(c));
    manifest["conditions"] = conds;
    json systems = json::array();
    for (const SystemSpec& s : cfg.systems) {
        json js;
        js["name"] = s.name;
        js["kind"] = kind_name(s.kind);
        js["polarity"] = s.polarity == Polarity::HigherIsReal ? "higher_is_real" : "higher_is_fake";
        js["partially_seen"] = s.partially_seen;
        if (s.kind == AdapterKind::WatermarkReference) {
            js["message_real"] = s.message_real.to_hex();
            js["message_fake"] = s.message_fake.to_hex();
            js["alpha"] = s.watermark.alpha;
        }
        systems.push_back(js);
    }
    manifest["systems"] = systems;
    manifest["warnings"] = config_warnings;
    manifest["trial_parameters"] = trial_params;
    manifest["skipped_trials"] = skipped_log;

    json results = json::object();
    for (const SystemReport& sr : report.systems) {
        json row = json::object();
        for (const CellResult& c : sr.cells) {
            json jc;
            jc["evaluated"] = c.evaluated;
            if (c.evaluated) {
                jc["eer"] = c.eer;
                jc["tau_star"] = c.tau_star;
            } else {
                jc["skip_reason"] = c.skip_reason;
            }
            jc["n_scored"] = c.n_scored;
            jc["n_skipped"] = c.n_skipped;
            if (c.mean_bit_accuracy) jc["mean_bit_accuracy"] = *c.mean_bit_accuracy;
            row[condition_name(c.condition)] = jc;
        }
        row["average_wo_none"] = sr.average_wo_none;
        results[sr.name] = row;
    }
    manifest["results"] = results;
    report.manifest = std::move(manifest);
    return report;
}

namespace {

std::string format_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
    return buf;
}

std::string group_label(ConditionKind c) {
    if (c == ConditionKind::None) return "none";
    std::string cat = default_category(c) == SeenCategory::PartiallySeen ? "partially seen"
                                                                         : "unseen";
    std::string grp = condition_group(c) == ConditionGroup::Transmission ? "transmission"
                                                                         : "manipulation";
    return cat + " / " + grp;
}

} // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
    const auto& systems = report.systems;
    if (systems.empty()) return "";
    const std::size_t n_rows = systems.front().cells.size();

    const auto cell_text = [&](const CellResult& c) -> std::string {
        if (!c.evaluated) return "skipped";
        std::string s = format_pct(c.eer);
        if (c.partially_seen) s += " *";
        return s;
    };

    if (format == ReportFormat::Markdown) {
        std::string out = "| Condition | Group |";
        for (const auto& s : systems) out += " " + s.name + " |";
        out += "\n|---|---|";
        for (std::size_t i = 0; i < systems.size(); ++i) out += "---|";
        out += "\n";
        for (std::size_t r = 0; r < n_rows; ++r) {
            const ConditionKind cond = systems.front().cells[r].condition;
            out += "| " + std::string(condition_name(cond)) + " | " + group_label(cond) + " |";
            for (const auto& s : systems) out += " " + cell_text(s.cells[r]) + " |";
            out += "\n";
        }
        out += "| Average w/o None | |";
        for (const auto& s : systems) out += " " + format_pct(s.average_wo_none) + " |";
        out += "\n";

        std::string notes;
        for (const auto& s : systems)
            for (const auto& c : s.cells)
                if (!c.evaluated)
                    notes += "- " + s.name + " / " + condition_name(c.condition) + ": " +
                             c.skip_reason + " (excluded from the average)\n";
        if (!notes.empty()) out += "\nSkipped cells:\n" + notes;
        out += "\nEER in percent; * marks conditions partially seen during that system's"
               " training-time augmentation.\n";
        return out;
    }

    if (format == ReportFormat::Csv) {
        std::string out = "condition,group";
        for (const auto& s : systems) out += "," + s.name;
        out += "\n";
        for (std::size_t r = 0; r < n_rows; ++r) {
            const ConditionKind cond = systems.front().cells[r].condition;
            out += std::string(condition_name(cond)) + "," + group_label(cond);
            for (const auto& s : systems) out += "," + cell_text(s.cells[r]);
            out += "\n";
        }
        out += "Average w/o None,";
        for (const auto& s : systems) out += "," + format_pct(s.average_wo_none);
        out += "\n";
        return out;
    }

    // JSON: full precision, structured
    nlohmann::json doc;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : systems) {
        nlohmann::json js;
        js["name"] = s.name;
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : s.cells) {
            nlohmann::json jc;
            jc["condition"] = condition_name(c.condition);
            jc["group"] = group_label(c.condition);
            jc["partially_seen"] = c.partially_seen;
            jc["evaluated"] = c.evaluated;
            if (c.evaluated) {
                jc["eer"] = c.eer;
                jc["eer_pct"] = format_pct(c.eer);
                jc["tau_star"] = c.tau_star;
            } else {
                jc["skip_reason"] = c.skip_reason;
            }
            jc["n_scored"] = c.n_scored;
            jc["n_skipped"] = c.n_skipped;
            if (c.mean_bit_accuracy) jc["mean_bit_accuracy"] = *c.mean_bit_accuracy;
            cells.push_back(jc);
        }
        js["cells"] = cells;
        js["average_wo_none"] = s.average_wo_none;
        js["average_count"] = s.average_count;
        rows.push_back(js);
    }
    doc["systems"] = rows;
    return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_outputs(const EvalReport& report, const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    std::vector<std::filesystem::path> written;
    const auto emit = [&](const std::filesystem::path& p, const std::string& text) {
        std::ofstream os(p, std::ios::binary | std::ios::trunc);
        if (!os) throw IoFailure("cannot write " + p.string());
        os << text;
        written.push_back(p);
    };
    for (const std::string& fmt : cfg.report_formats) {
        if (fmt == "markdown") emit(cfg.output_dir / "report.md",
                                    render_report(report, ReportFormat::Markdown));
        else if (fmt == "csv") emit(cfg.output_dir / "report.csv",
                                    render_report(report, ReportFormat::Csv));
        else emit(cfg.output_dir / "report.json", render_report(report, ReportFormat::Json));
    }
    emit(cfg.output_dir / "manifest.json", report.manifest.dump(2) + "\n");
    return written;
}

} // namespace deepmark
