#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace spikeforge {

/// Append-only sequence of fixed-width bit fields.
///
/// Fields are packed back to back with the most significant bit of each
/// field first, and bit k of the sequence lives in byte k/8 at mask
/// 0x80 >> (k % 8). Nothing is byte-aligned except the end of the buffer.
class BitBuffer {
public:
    BitBuffer() = default;

    uint64_t size_bits() const { return bits_; }
    const std::vector<uint8_t>& bytes() const { return bytes_; }

    void append(uint64_t value, uint32_t width) {
        for (uint32_t k = width; k-- > 0;) {
            push_bit((value >> k) & 1u);
        }
    }

    uint64_t read(uint64_t pos, uint32_t width) const {
        uint64_t v = 0;
        for (uint32_t k = 0; k < width; ++k, ++pos) {
            v = (v << 1) | ((bytes_[pos >> 3] >> (7 - (pos & 7))) & 1u);
        }
        return v;
    }

    /// Replace `width` bits starting at `pos` without changing the length.
    void overwrite(uint64_t pos, uint64_t value, uint32_t width) {
        for (uint32_t k = width; k-- > 0; ++pos) {
            const uint8_t bit = (value >> k) & 1u;
            uint8_t& b = bytes_[pos >> 3];
            const uint8_t mask = uint8_t(0x80u >> (pos & 7));
            b = bit ? uint8_t(b | mask) : uint8_t(b & ~mask);
        }
    }

    static BitBuffer from_bytes(std::vector<uint8_t> bytes, uint64_t size_bits) {
        BitBuffer b;
        b.bytes_ = std::move(bytes);
        b.bits_ = size_bits;
        return b;
    }

    bool operator==(const BitBuffer&) const = default;

private:
    void push_bit(uint8_t bit) {
        if ((bits_ & 7) == 0) bytes_.push_back(0);
        if (bit) bytes_.back() |= uint8_t(0x80u >> (bits_ & 7));
        ++bits_;
    }

    uint64_t bits_ = 0;
    std::vector<uint8_t> bytes_;
};

}  // namespace spikeforge
