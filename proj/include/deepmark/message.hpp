#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepmark/errors.hpp"

namespace deepmark {

/// L-bit watermark payload. Bits are stored most-significant-first relative
/// to the hex form, values 0 or 1.
struct Message {
    std::vector<std::uint8_t> bits;

    std::size_t size() const { return bits.size(); }

    static Message from_hex(const std::string& hex) {
        Message m;
        m.bits.reserve(hex.size() * 4);
        for (char c : hex) {
            int v;
            if (c >= '0' && c <= '9') v = c - '0';
            else if (c >= 'a' && c <= 'f') v = 10 + (c - 'a');
            else if (c >= 'A' && c <= 'F') v = 10 + (c - 'A');
            else throw ParseFailure(std::string("invalid hex digit '") + c + "' in message");
            for (int b = 3; b >= 0; --b)
                m.bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
        }
        if (m.bits.empty()) throw ParseFailure("empty message hex string");
        return m;
    }

    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (std::size_t i = 0; i + 3 < bits.size(); i += 4) {
            const int v = (bits[i] << 3) | (bits[i + 1] << 2) | (bits[i + 2] << 1) | bits[i + 3];
            out.push_back(digits[v]);
        }
        return out;
    }

    Message complement() const {
        Message m = *this;
        for (auto& b : m.bits) b = static_cast<std::uint8_t>(1 - b);
        return m;
    }

    bool operator==(const Message&) const = default;
};

/// Per-bit likelihood scores; positive favors bit value 1.
struct BitScores {
    std::vector<double> values;
    std::size_t size() const { return values.size(); }
};

/// The two payloads assigned to real and fake audio.
struct MessagePair {
    Message m_real;
    Message m_fake;

    std::size_t size() const { return m_real.size(); }

    /// Positions where the two messages agree contribute nothing to the
    /// fused score; fully disjoint pairs use the whole capacity.
    bool bitwise_disjoint() const {
        if (m_real.size() != m_fake.size()) return false;
        for (std::size_t i = 0; i < m_real.size(); ++i)
            if (m_real.bits[i] == m_fake.bits[i]) return false;
        return true;
    }
};

} // namespace deepmark
