#include "deepmark/external_tool.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>

#include "deepmark/resample.hpp"
#include "deepmark/wav_io.hpp"

namespace deepmark {

namespace fs = std::filesystem;

namespace {

std::atomic<std::uint64_t> g_invocation_counter{0};

fs::path make_scratch_dir() {
    const std::uint64_t id = g_invocation_counter.fetch_add(1);
    fs::path d = fs::temp_directory_path() /
                 ("deepmark_tool_" + std::to_string(static_cast<long>(::getpid())) + "_" +
                  std::to_string(id));
    fs::create_directories(d);
    return d;
}

struct ScratchGuard {
    fs::path dir;
    ~ScratchGuard() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
};

} // namespace

Waveform external_condition(const Waveform& w, const std::string& tool,
                            const std::vector<std::string>& extra_args) {
    require_nonempty(w, "external_condition");
    if (tool.empty()) throw ToolFailure("external_condition: empty tool command");

    ScratchGuard scratch{make_scratch_dir()};
    const fs::path in_path = scratch.dir / "in.wav";
    const fs::path out_path = scratch.dir / "out.wav";

    write_pcm(w, in_path, PcmBitDepth::Int16);

    std::string cmd = tool + " '" + in_path.string() + "' '" + out_path.string() + "'";
    for (const auto& a : extra_args) cmd += " " + a;

    const int status = std::system(cmd.c_str());
    if (status != 0)
        throw ToolFailure("external tool exited with status " + std::to_string(status) + ": " +
                          tool);

    Waveform out;
    try {
        out = read_pcm(out_path);
    } catch (const Error& e) {
        throw MalformedToolOutput(std::string("external tool wrote unreadable output: ") +
                                  e.what());
    }
    if (out.empty()) throw MalformedToolOutput("external tool wrote an empty file: " + tool);

    if (out.sample_rate_hz != w.sample_rate_hz) out = resample(out, w.sample_rate_hz);
    out.samples.resize(w.size(), 0.0); // trim or zero-pad to the input length
    return out;
}

} // namespace deepmark
