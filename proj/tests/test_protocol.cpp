// Tests for the countermeasure protocol parser and audio binding.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "deepmark/protocol.hpp"
#include "deepmark/toygen.hpp"

using namespace deepmark;
namespace fs = std::filesystem;

TEST_CASE("parse_cm_protocol reads the five-field grammar") {
    std::istringstream in("LA_0079 LA_T_1138215 - - bonafide\n"
                          "LA_0079 LA_T_1007571 - A01 spoof\n");
    const TrialList t = parse_cm_protocol(in);
    REQUIRE(t.size() == 2);
    CHECK(t.entries[0].utterance_id == "LA_T_1138215");
    CHECK(t.entries[0].label == Label::Real);
    CHECK_FALSE(t.entries[0].attack_tag.has_value());
    CHECK(t.entries[1].utterance_id == "LA_T_1007571");
    CHECK(t.entries[1].label == Label::Fake);
    REQUIRE(t.entries[1].attack_tag.has_value());
    CHECK(*t.entries[1].attack_tag == "A01");
}

TEST_CASE("parse_cm_protocol rejects unknown keys with the line number") {
    std::istringstream in("LA_0079 LA_T_1 - - genuine\n");
    try {
        parse_cm_protocol(in);
        FAIL("expected ParseFailure");
    } catch (const ParseFailure& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("parse_cm_protocol rejects short lines and duplicates") {
    std::istringstream short_line("LA_0079 LA_T_1 bonafide\n");
    CHECK_THROWS_AS(parse_cm_protocol(short_line), ParseFailure);

    std::istringstream dup("S A - - bonafide\nS A - - spoof\n");
    CHECK_THROWS_AS(parse_cm_protocol(dup), DuplicateUtterance);
}

TEST_CASE("parse_cm_protocol skips blank lines and tolerates extra fields") {
    std::istringstream in("\nS A - - bonafide extra stuff\n\n");
    const TrialList t = parse_cm_protocol(in);
    REQUIRE(t.size() == 1);
    CHECK(t.entries[0].utterance_id == "A");
}

TEST_CASE("bind_audio binds present files and honors the policies") {
    const fs::path dir = fs::temp_directory_path() / "deepmark_bind_test";
    fs::create_directories(dir);
    for (const char* name : {"U1", "U2"}) {
        std::ofstream os(dir / (std::string(name) + ".wav"));
        os << "placeholder";
    }

    TrialList trials;
    for (const char* name : {"U1", "U2", "U3"}) {
        TrialEntry e;
        e.utterance_id = name;
        e.label = Label::Real;
        trials.entries.push_back(e);
    }

    const BoundTrials skipped = bind_audio(trials, dir, "wav", MissingAudioPolicy::SkipWithWarning);
    CHECK(skipped.trials.size() == 2);
    REQUIRE(skipped.skipped.size() == 1);
    CHECK(skipped.skipped[0] == "U3");

    try {
        bind_audio(trials, dir, "wav", MissingAudioPolicy::Fail);
        FAIL("expected MissingAudio");
    } catch (const MissingAudio& e) {
        CHECK(std::string(e.what()).find("U3") != std::string::npos);
    }

    trials.entries.pop_back();
    const BoundTrials all = bind_audio(trials, dir, "wav", MissingAudioPolicy::Fail);
    CHECK(all.trials.size() == 2);
    CHECK(all.skipped.empty());
    for (const auto& e : all.trials.entries) CHECK(e.audio_path.has_value());
}

TEST_CASE("write_toy_set emits parseable protocol plus readable audio") {
    const fs::path dir = fs::temp_directory_path() / "deepmark_toy_write";
    fs::remove_all(dir);
    const ToySet set = synth_toy_trials(3, 2, 11);
    write_toy_set(set, dir);

    const TrialList parsed = parse_cm_protocol_file(dir / "protocol.txt");
    REQUIRE(parsed.size() == 5);
    const BoundTrials bound = bind_audio(parsed, dir, "wav", MissingAudioPolicy::Fail);
    CHECK(bound.trials.size() == 5);

    int fakes = 0;
    for (const auto& e : parsed.entries)
        if (e.label == Label::Fake) ++fakes;
    CHECK(fakes == 2);
}
