#pragma once

#include "evlec/errors.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace evlec {

// MSB-first bit packer: the first bit written lands in the most significant
// bit of the first byte. Multi-bit fields are written most significant bit
// first.
class bit_writer {
public:
    void put_bit(bool bit) {
        if (fill_ == 0) {
            bytes_.push_back(0);
            fill_ = 8;
        }
        --fill_;
        if (bit)
            bytes_.back() |= static_cast<std::uint8_t>(1u << fill_);
        ++bit_count_;
    }

    void put_bits(std::uint64_t value, int nbits) {
        for (int i = nbits - 1; i >= 0; --i)
            put_bit((value >> i) & 1u);
    }

    std::uint64_t bit_count() const { return bit_count_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    int fill_ = 0; // unused bits remaining in bytes_.back()
    std::uint64_t bit_count_ = 0;
};

// Companion reader. `limit_bits` bounds the readable region; overruns throw
// decode_error with the byte offset of the failure (relative to the span,
// plus an optional base offset for error reporting in a larger stream).
class bit_reader {
public:
    bit_reader(std::span<const std::uint8_t> bytes, std::uint64_t limit_bits,
               std::uint64_t base_byte_offset = 0)
        : bytes_(bytes), limit_bits_(limit_bits), base_(base_byte_offset) {}

    bool get_bit() {
        if (pos_ >= limit_bits_)
            throw decode_error("bitstream overrun", base_ + pos_ / 8);
        const std::uint64_t byte = pos_ >> 3;
        const int shift = 7 - static_cast<int>(pos_ & 7);
        ++pos_;
        return (bytes_[byte] >> shift) & 1u;
    }

    std::uint64_t get_bits(int nbits) {
        std::uint64_t v = 0;
        for (int i = 0; i < nbits; ++i)
            v = (v << 1) | (get_bit() ? 1u : 0u);
        return v;
    }

    std::uint64_t position() const { return pos_; }
    std::uint64_t remaining() const { return limit_bits_ - pos_; }
    std::uint64_t error_offset() const { return base_ + pos_ / 8; }

private:
    std::span<const std::uint8_t> bytes_;
    std::uint64_t limit_bits_;
    std::uint64_t base_;
    std::uint64_t pos_ = 0;
};

// Bits needed to store values 0..max_value inclusive (>= 1).
inline int bit_width_for(std::uint64_t max_value) {
    int bits = 1;
    while ((max_value >> bits) != 0)
        ++bits;
    return bits;
}

// CRC-32 (IEEE 802.3, reflected, poly 0xEDB88320).
std::uint32_t crc32(std::span<const std::uint8_t> data, std::uint32_t seed = 0);

} // namespace evlec
