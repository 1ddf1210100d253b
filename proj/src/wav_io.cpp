#include "deepmark/wav_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace deepmark {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

} // namespace

Waveform read_pcm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path.string());
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (raw.size() < 44) throw CorruptHeader(path.string() + ": file shorter than a WAVE header");
    if (std::memcmp(raw.data(), "RIFF", 4) != 0 || std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
        throw CorruptHeader(path.string() + ": not a RIFF/WAVE file");

    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint16_t bits = 0;
    std::uint32_t sample_rate = 0;
    bool have_fmt = false;
    const unsigned char* data_ptr = nullptr;
    std::size_t data_size = 0;

    // Walk chunks. Sizes are padded to even offsets per RIFF.
    std::size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        const char* tag = reinterpret_cast<const char*>(raw.data() + pos);
        const std::uint32_t size = read_u32(raw.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > raw.size())
            throw CorruptHeader(path.string() + ": chunk overruns file");
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            if (size < 16) throw CorruptHeader(path.string() + ": fmt chunk too small");
            format = read_u16(raw.data() + body);
            channels = read_u16(raw.data() + body + 2);
            sample_rate = read_u32(raw.data() + body + 4);
            bits = read_u16(raw.data() + body + 14);
            if (format == kFormatExtensible) {
                if (size < 40) throw CorruptHeader(path.string() + ": extensible fmt truncated");
                format = read_u16(raw.data() + body + 24); // first two bytes of SubFormat GUID
            }
            have_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            data_ptr = raw.data() + body;
            data_size = size;
        }
        pos = body + size + (size & 1);
    }

    if (!have_fmt) throw CorruptHeader(path.string() + ": missing fmt chunk");
    if (data_ptr == nullptr) throw CorruptHeader(path.string() + ": missing data chunk");
    if (channels == 0 || sample_rate == 0)
        throw CorruptHeader(path.string() + ": zero channels or sample rate");

    const bool int16 = (format == kFormatPcm && bits == 16);
    const bool float32 = (format == kFormatFloat && bits == 32);
    if (!int16 && !float32)
        throw UnsupportedFormat(path.string() + ": only 16-bit PCM and 32-bit float supported (format " +
                                std::to_string(format) + ", " + std::to_string(bits) + " bits)");

    const std::size_t bytes_per_sample = int16 ? 2 : 4;
    const std::size_t frame_bytes = bytes_per_sample * channels;
    const std::size_t num_frames = data_size / frame_bytes;

    Waveform w;
    w.sample_rate_hz = static_cast<int>(sample_rate);
    w.samples.resize(num_frames);
    for (std::size_t i = 0; i < num_frames; ++i) {
        const unsigned char* s = data_ptr + i * frame_bytes; // first channel only
        if (int16) {
            const std::int16_t v = static_cast<std::int16_t>(read_u16(s));
            w.samples[i] = static_cast<double>(v) / 32768.0;
        } else {
            float f = 0.0f;
            std::memcpy(&f, s, 4);
            w.samples[i] = static_cast<double>(f);
        }
    }
    return w;
}

void write_pcm(const Waveform& w, const std::filesystem::path& path, PcmBitDepth depth) {
    const bool int16 = (depth == PcmBitDepth::Int16);
    const std::uint16_t bits = int16 ? 16 : 32;
    const std::uint32_t byte_rate = static_cast<std::uint32_t>(w.sample_rate_hz) * bits / 8;
    const std::uint32_t data_size = static_cast<std::uint32_t>(w.samples.size() * bits / 8);

    std::vector<unsigned char> out;
    out.reserve(44 + data_size);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_size);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, int16 ? kFormatPcm : kFormatFloat);
    put_u16(out, 1); // mono
    put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
    put_u32(out, byte_rate);
    put_u16(out, static_cast<std::uint16_t>(bits / 8));
    put_u16(out, bits);
    put_tag(out, "data");
    put_u32(out, data_size);

    for (double x : w.samples) {
        if (int16) {
            double scaled = std::round(x * 32768.0);
            if (scaled > 32767.0) scaled = 32767.0;
            if (scaled < -32768.0) scaled = -32768.0;
            put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
        } else {
            const float f = static_cast<float>(x);
            unsigned char b[4];
            std::memcpy(b, &f, 4);
            out.insert(out.end(), b, b + 4);
        }
    }

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!os) throw IoFailure("short write to " + path.string());
}

} // namespace deepmark
