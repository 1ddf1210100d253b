// Tests for the evaluation harness: config validation, pipeline ordering,
// determinism, caching, skip accounting, and report rendering.

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "deepmark/harness.hpp"

using namespace deepmark;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("deepmark_harness_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

json base_config(const fs::path& out_dir) {
    return json{
        {"master_seed", 424242},
        {"dataset", {{"toy", {{"n_real", 4}, {"n_fake", 4}}}}},
        {"systems",
         json::array({json{{"name", "ref-wm"},
                           {"kind", "watermark_reference"},
                           {"polarity", "higher_is_real"},
                           {"message_real", "a59c"},
                           {"message_fake", "5a63"}},
                      json{{"name", "baseline"}, {"kind", "builtin_baseline"}}})},
        {"conditions", json::array({"None", "Clipping"})},
        {"output_dir", out_dir.string()},
        {"parallelism", 2},
    };
}

} // namespace

TEST_CASE("parse_run_config validates the schema with helpful errors") {
    CHECK_THROWS_AS(parse_run_config(json::array()), ConfigInvalid);
    CHECK_THROWS_AS(parse_run_config(json{{"master_seed", 1}}), ConfigInvalid); // no dataset

    json cfg = base_config("out");
    cfg["systems"][0].erase("message_real");
    CHECK_THROWS_AS(parse_run_config(cfg), ConfigInvalid);

    cfg = base_config("out");
    cfg["conditions"].push_back("NotACondition");
    CHECK_THROWS_AS(parse_run_config(cfg), ConfigInvalid);

    cfg = base_config("out");
    cfg["systems"][0]["kind"] = "quantum";
    CHECK_THROWS_AS(parse_run_config(cfg), ConfigInvalid);

    cfg = base_config("out");
    cfg["systems"][0]["partially_seen"] = json::array({"Nope"});
    CHECK_THROWS_AS(parse_run_config(cfg), ConfigInvalid);
}

TEST_CASE("parse_run_config always includes the None condition") {
    json cfg = base_config("out");
    cfg["conditions"] = json::array({"Clipping"});
    const RunConfig rc = parse_run_config(cfg);
    CHECK(std::count(rc.conditions.begin(), rc.conditions.end(), ConditionKind::None) == 1);
}

TEST_CASE("run_eval: clean watermark pipeline yields EER 0 and full bit accuracy") {
    const fs::path out = fresh_dir("clean");
    const RunConfig rc = parse_run_config(base_config(out));
    const EvalReport report = run_eval(rc);

    REQUIRE(report.systems.size() == 2);
    const SystemReport& wm = report.systems[0];
    CHECK(wm.name == "ref-wm");
    REQUIRE(!wm.cells.empty());
    const CellResult& none_cell = wm.cells[0];
    CHECK(none_cell.condition == ConditionKind::None);
    REQUIRE(none_cell.evaluated);
    CHECK(none_cell.eer == 0.0);
    REQUIRE(none_cell.mean_bit_accuracy.has_value());
    CHECK(*none_cell.mean_bit_accuracy == 1.0); // pipeline ordering sentinel
    CHECK(none_cell.n_scored == 8);
    CHECK(none_cell.n_skipped == 0);
}

TEST_CASE("run_eval is byte-identical across repeats and parallelism levels") {
    const fs::path out1 = fresh_dir("det1");
    json cfg = base_config(out1);
    const EvalReport a = run_eval(parse_run_config(cfg));

    const fs::path out2 = fresh_dir("det2");
    cfg["output_dir"] = out2.string();
    const EvalReport b = run_eval(parse_run_config(cfg));

    const fs::path out3 = fresh_dir("det3");
    cfg["output_dir"] = out3.string();
    cfg["parallelism"] = 8;
    const EvalReport c = run_eval(parse_run_config(cfg));

    for (ReportFormat fmt : {ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json}) {
        CHECK(render_report(a, fmt) == render_report(b, fmt));
        CHECK(render_report(a, fmt) == render_report(c, fmt));
    }
    CHECK(a.manifest["trial_parameters"] == b.manifest["trial_parameters"]);
    CHECK(a.manifest["trial_parameters"] == c.manifest["trial_parameters"]);
}

TEST_CASE("run_eval marks tool-less conditions skipped and excludes them from the average") {
    const fs::path out = fresh_dir("skipped");
    json cfg = base_config(out);
    cfg["conditions"] = json::array({"None", "Clipping", "Opus"});
    const EvalReport report = run_eval(parse_run_config(cfg));

    for (const SystemReport& s : report.systems) {
        bool found_opus = false;
        double sum = 0.0;
        int count = 0;
        for (const CellResult& c : s.cells) {
            CHECK(c.n_scored + c.n_skipped == 8); // skip accounting
            if (c.condition == ConditionKind::Opus) {
                found_opus = true;
                CHECK_FALSE(c.evaluated);
                CHECK(c.skip_reason.find("tool") != std::string::npos);
            } else if (c.condition != ConditionKind::None && c.evaluated) {
                sum += c.eer;
                ++count;
            }
        }
        CHECK(found_opus);
        REQUIRE(count == s.average_count);
        CHECK(std::abs(s.average_wo_none - sum / count) <= 1e-9);

        // skipped cells are footnoted in the rendered report
        const std::string md = render_report(report, ReportFormat::Markdown);
        CHECK(md.find("Opus: no tool configured") != std::string::npos);
        CHECK(md.find("excluded from the average") != std::string::npos);
    }
}

TEST_CASE("render_report marks partially seen cells with an asterisk") {
    const fs::path out = fresh_dir("asterisk");
    json cfg = base_config(out);
    cfg["systems"][0]["partially_seen"] = json::array({"Clipping"});
    const EvalReport report = run_eval(parse_run_config(cfg));

    const std::string md = render_report(report, ReportFormat::Markdown);
    bool seen_star = false;
    std::istringstream lines(md);
    std::string line;
    while (std::getline(lines, line))
        if (line.find("Clipping") != std::string::npos && line.find(" *") != std::string::npos)
            seen_star = true;
    CHECK(seen_star);

    const std::string csv = render_report(report, ReportFormat::Csv);
    std::istringstream csv_lines(csv);
    std::size_t n_lines = 0;
    std::string header;
    while (std::getline(csv_lines, line)) {
        if (n_lines == 0) header = line;
        ++n_lines;
    }
    CHECK(header == "condition,group,ref-wm,baseline");
    CHECK(n_lines == 1 + 2 + 1); // header + two condition rows + average row
}

TEST_CASE("cache keys are stable in the triple and distinct across seeds") {
    CHECK(cache_key("Clipping", "U1", 7) == cache_key("Clipping", "U1", 7));
    CHECK(cache_key("Clipping", "U1", 7) != cache_key("Clipping", "U1", 8));
    CHECK(cache_key("Clipping", "U1", 7) != cache_key("Clipping", "U2", 7));
    CHECK(cache_key("Clipping", "U1", 7) != cache_key("Overdrive", "U1", 7));
}

TEST_CASE("disk cache reuse leaves the report bit-identical") {
    const fs::path out = fresh_dir("cache");
    json cfg = base_config(out);
    cfg["cache"] = true;
    const RunConfig rc = parse_run_config(cfg);
    const EvalReport cold = run_eval(rc);
    CHECK(fs::exists(out / "cache"));
    const EvalReport warm = run_eval(rc); // second run reads cached audio
    CHECK(render_report(cold, ReportFormat::Json) == render_report(warm, ReportFormat::Json));
}

TEST_CASE("score_file systems honor polarity so the EER is declaration-invariant") {
    const fs::path out = fresh_dir("polarity");

    // toy trial ids are deterministic: TOY_R_0001.. and TOY_F_0001..
    const fs::path plus = out / "scores_real_high.txt";
    const fs::path minus = out / "scores_fake_high.txt";
    {
        std::ofstream a(plus), b(minus);
        for (int i = 1; i <= 4; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "TOY_R_%04d", i);
            a << id << " " << (1.0 + 0.1 * i) << "\n";
            b << id << " " << -(1.0 + 0.1 * i) << "\n";
        }
        for (int i = 1; i <= 4; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "TOY_F_%04d", i);
            a << id << " " << (-1.0 - 0.1 * i) << "\n";
            b << id << " " << (1.0 + 0.1 * i) << "\n";
        }
    }

    json cfg = base_config(out);
    cfg["conditions"] = json::array({"None"});
    cfg["systems"] = json::array(
        {json{{"name", "sf-real-high"},
              {"kind", "score_file"},
              {"path", plus.filename().string()},
              {"polarity", "higher_is_real"}},
         json{{"name", "sf-fake-high"},
              {"kind", "score_file"},
              {"path", minus.filename().string()},
              {"polarity", "higher_is_fake"}}});
    const RunConfig rc = parse_run_config(cfg, out);
    const EvalReport report = run_eval(rc);
    REQUIRE(report.systems.size() == 2);
    REQUIRE(report.systems[0].cells[0].evaluated);
    REQUIRE(report.systems[1].cells[0].evaluated);
    CHECK(report.systems[0].cells[0].eer == report.systems[1].cells[0].eer);
    CHECK(report.systems[0].cells[0].eer == 0.0);
}

TEST_CASE("write_outputs emits the requested formats plus the manifest") {
    const fs::path out = fresh_dir("outputs");
    json cfg = base_config(out);
    const RunConfig rc = parse_run_config(cfg);
    const EvalReport report = run_eval(rc);
    const auto written = write_outputs(report, rc);
    CHECK(written.size() == 4); // md + csv + json + manifest
    CHECK(fs::exists(out / "report.md"));
    CHECK(fs::exists(out / "report.csv"));
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "manifest.json"));

    // manifest replay data: sampled parameters recorded per condition/trial
    std::ifstream in(out / "manifest.json");
    json manifest;
    in >> manifest;
    CHECK(manifest.contains("trial_parameters"));
    CHECK(manifest["trial_parameters"].contains("Clipping"));
}

TEST_CASE("score_file systems skip trials missing from the file") {
    const fs::path out = fresh_dir("missing_score");
    const fs::path scores = out / "partial_scores.txt";
    {
        std::ofstream os(scores);
        for (int i = 1; i <= 4; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "TOY_R_%04d", i);
            os << id << " 1.0\n";
        }
        // fake scores for only 3 of the 4 fakes
        for (int i = 1; i <= 3; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "TOY_F_%04d", i);
            os << id << " -1.0\n";
        }
    }
    json cfg = base_config(out);
    cfg["conditions"] = json::array({"None"});
    cfg["systems"] = json::array({json{{"name", "partial"},
                                       {"kind", "score_file"},
                                       {"path", scores.filename().string()}}});
    const EvalReport report = run_eval(parse_run_config(cfg, out));
    const CellResult& cell = report.systems[0].cells[0];
    CHECK(cell.n_scored == 7);
    CHECK(cell.n_skipped == 1);
    REQUIRE(cell.evaluated);
    CHECK(cell.eer == 0.0);
}
