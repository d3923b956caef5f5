#pragma once

#include "evlec/bitio.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace evlec {

// ---------------------------------------------------------------------------
// Differential coordinate coding
// ---------------------------------------------------------------------------

struct cell_location {
    int x = 0;
    int y = 0;
    friend bool operator==(const cell_location&, const cell_location&) = default;
};

// Raster-order (y-major) locations inside a block of `block_width` columns,
// origin (origin_x, origin_y), mapped to: first symbol = linear index of the
// first location, subsequent symbols = positive index gaps.
// Inputs must be strictly raster-sorted and duplicate free.
std::vector<std::uint32_t> delta_encode(const std::vector<cell_location>& locations,
                                        int origin_x, int origin_y, int block_width);

std::vector<cell_location> delta_decode(const std::vector<std::uint32_t>& symbols,
                                        int origin_x, int origin_y, int block_width);

// ---------------------------------------------------------------------------
// Run-length coding
// ---------------------------------------------------------------------------

struct run {
    std::uint32_t value = 0;
    std::uint32_t length = 0; // >= 1
    friend bool operator==(const run&, const run&) = default;
};

// Maximal runs: adjacent runs always have distinct values.
std::vector<run> rle_encode(const std::vector<std::uint32_t>& values);
std::vector<std::uint32_t> rle_decode(const std::vector<run>& runs);

// ---------------------------------------------------------------------------
// Canonical Huffman
// ---------------------------------------------------------------------------

// Canonical prefix code over 16-bit symbols, reconstructible from code
// lengths alone. Codes are assigned in (length, symbol) order.
class huffman_table {
public:
    huffman_table() = default;

    // Optimal prefix code for the given frequencies. Single-symbol alphabets
    // get a 1-bit code. Empty input is an argument error.
    static huffman_table build(const std::map<std::uint16_t, std::uint64_t>& frequencies);

    // Rebuild from (symbol, length) pairs, e.g. parsed from a stream header.
    static huffman_table from_lengths(const std::vector<std::pair<std::uint16_t, std::uint8_t>>& lengths);

    void encode_symbol(bit_writer& bw, std::uint16_t symbol) const;
    std::uint16_t decode_symbol(bit_reader& br) const;

    void encode(bit_writer& bw, const std::vector<std::uint16_t>& symbols) const;
    std::vector<std::uint16_t> decode(bit_reader& br, std::size_t n_symbols) const;

    bool contains(std::uint16_t symbol) const;
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    // (symbol, length) pairs in canonical order; the wire representation.
    const std::vector<std::pair<std::uint16_t, std::uint8_t>>& lengths() const {
        return lengths_;
    }

    // Sum over symbols of 2^-length.
    double kraft_sum() const;

    friend bool operator==(const huffman_table&, const huffman_table&) = default;

private:
    struct entry {
        std::uint16_t symbol = 0;
        std::uint8_t length = 0;
        std::uint64_t code = 0; // MSB-first, `length` bits
        friend bool operator==(const entry&, const entry&) = default;
    };
    struct level {
        std::uint8_t len = 0;
        std::uint64_t first_code = 0;
        std::size_t offset = 0; // into entries_
        std::size_t count = 0;
        friend bool operator==(const level&, const level&) = default;
    };

    void assign_canonical_codes();

    std::vector<std::pair<std::uint16_t, std::uint8_t>> lengths_; // canonical order
    std::vector<entry> entries_;                                  // canonical order
    std::vector<level> levels_;                                   // one per distinct length
    std::vector<std::int32_t> encode_index_;                      // symbol -> entry, -1 if absent
};

} // namespace evlec
