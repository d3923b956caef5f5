#include "evlec/entropy.hpp"

#include "evlec/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace evlec {

std::uint32_t crc32(std::span<const std::uint8_t> data, std::uint32_t seed) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = seed ^ 0xFFFFFFFFu;
    for (std::uint8_t byte : data)
        crc = table[(crc ^ byte) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

// ---------------------------------------------------------------------------
// Differential coordinate coding
// ---------------------------------------------------------------------------

std::vector<std::uint32_t> delta_encode(const std::vector<cell_location>& locations,
                                        int origin_x, int origin_y, int block_width) {
    std::vector<std::uint32_t> symbols;
    symbols.reserve(locations.size());
    std::int64_t prev = -1;
    for (const cell_location& loc : locations) {
        const int rx = loc.x - origin_x;
        const int ry = loc.y - origin_y;
        if (rx < 0 || rx >= block_width || ry < 0)
            throw argument_error("location outside block");
        const std::int64_t idx = static_cast<std::int64_t>(ry) * block_width + rx;
        if (idx == prev)
            throw argument_error("duplicate location in delta_encode input");
        if (idx < prev)
            throw argument_error("delta_encode input not raster-sorted");
        symbols.push_back(static_cast<std::uint32_t>(prev < 0 ? idx : idx - prev));
        prev = idx;
    }
    return symbols;
}

std::vector<cell_location> delta_decode(const std::vector<std::uint32_t>& symbols,
                                        int origin_x, int origin_y, int block_width) {
    std::vector<cell_location> locations;
    locations.reserve(symbols.size());
    std::int64_t idx = -1;
    bool first = true;
    for (std::uint32_t s : symbols) {
        idx = first ? static_cast<std::int64_t>(s) : idx + s;
        first = false;
        locations.push_back(cell_location{origin_x + static_cast<int>(idx % block_width),
                                          origin_y + static_cast<int>(idx / block_width)});
    }
    return locations;
}

// ---------------------------------------------------------------------------
// Run-length coding
// ---------------------------------------------------------------------------

std::vector<run> rle_encode(const std::vector<std::uint32_t>& values) {
    std::vector<run> runs;
    for (std::uint32_t v : values) {
        if (!runs.empty() && runs.back().value == v)
            ++runs.back().length;
        else
            runs.push_back(run{v, 1});
    }
    return runs;
}

std::vector<std::uint32_t> rle_decode(const std::vector<run>& runs) {
    std::vector<std::uint32_t> values;
    for (const run& r : runs)
        values.insert(values.end(), r.length, r.value);
    return values;
}

// ---------------------------------------------------------------------------
// Canonical Huffman
// ---------------------------------------------------------------------------

huffman_table huffman_table::build(const std::map<std::uint16_t, std::uint64_t>& frequencies) {
    if (frequencies.empty())
        throw argument_error("huffman_table::build: empty frequency map");

    struct node {
        std::uint64_t freq;
        std::uint32_t order; // creation order, ties broken deterministically
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint16_t symbol = 0;
    };
    std::vector<node> nodes;
    nodes.reserve(frequencies.size() * 2);
    for (auto [sym, freq] : frequencies) {
        if (freq == 0)
            throw argument_error("huffman_table::build: zero frequency for symbol " +
                                 std::to_string(sym));
        nodes.push_back(node{freq, static_cast<std::uint32_t>(nodes.size()), -1, -1, sym});
    }

    auto cmp = [&](std::int32_t a, std::int32_t b) {
        if (nodes[a].freq != nodes[b].freq)
            return nodes[a].freq > nodes[b].freq;
        return nodes[a].order > nodes[b].order;
    };
    std::priority_queue<std::int32_t, std::vector<std::int32_t>, decltype(cmp)> heap(cmp);
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(nodes.size()); ++i)
        heap.push(i);

    while (heap.size() > 1) {
        std::int32_t a = heap.top();
        heap.pop();
        std::int32_t b = heap.top();
        heap.pop();
        nodes.push_back(node{nodes[a].freq + nodes[b].freq,
                             static_cast<std::uint32_t>(nodes.size()), a, b, 0});
        heap.push(static_cast<std::int32_t>(nodes.size()) - 1);
    }

    std::vector<std::pair<std::uint16_t, std::uint8_t>> lengths;
    lengths.reserve(frequencies.size());
    if (frequencies.size() == 1) {
        lengths.emplace_back(nodes.front().symbol, 1);
    } else {
        // iterative depth walk from the root
        std::vector<std::pair<std::int32_t, std::uint8_t>> stack{{heap.top(), 0}};
        while (!stack.empty()) {
            auto [idx, depth] = stack.back();
            stack.pop_back();
            const node& n = nodes[idx];
            if (n.left < 0) {
                lengths.emplace_back(n.symbol, depth);
            } else {
                if (depth >= 63)
                    throw argument_error("huffman_table::build: code length overflow");
                stack.emplace_back(n.left, static_cast<std::uint8_t>(depth + 1));
                stack.emplace_back(n.right, static_cast<std::uint8_t>(depth + 1));
            }
        }
    }

    return from_lengths(lengths);
}

huffman_table huffman_table::from_lengths(
    const std::vector<std::pair<std::uint16_t, std::uint8_t>>& lengths) {
    huffman_table table;
    table.lengths_ = lengths;
    std::sort(table.lengths_.begin(), table.lengths_.end(),
              [](const auto& a, const auto& b) {
                  return a.second != b.second ? a.second < b.second : a.first < b.first;
              });

    double kraft = 0.0;
    for (auto [sym, len] : table.lengths_) {
        (void)sym;
        if (len == 0 || len > 63)
            throw argument_error("huffman code length out of range");
        kraft += std::ldexp(1.0, -static_cast<int>(len));
    }
    {
        auto sorted = table.lengths_;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i].first == sorted[i - 1].first)
                throw argument_error("duplicate symbol in huffman table");
    }
    if (kraft > 1.0 + 1e-12)
        throw argument_error("huffman table violates the Kraft inequality");

    table.assign_canonical_codes();
    return table;
}

void huffman_table::assign_canonical_codes() {
    entries_.clear();
    entries_.reserve(lengths_.size());
    levels_.clear();
    std::uint64_t code = 0;
    std::uint8_t prev_len = 0;
    std::uint16_t max_symbol = 0;
    for (auto [sym, len] : lengths_) {
        code <<= (len - prev_len);
        if (levels_.empty() || levels_.back().len != len)
            levels_.push_back(level{len, code, entries_.size(), 0});
        ++levels_.back().count;
        entries_.push_back(entry{sym, len, code});
        ++code;
        prev_len = len;
        max_symbol = std::max(max_symbol, sym);
    }
    encode_index_.assign(static_cast<std::size_t>(max_symbol) + 1, -1);
    for (std::size_t i = 0; i < entries_.size(); ++i)
        encode_index_[entries_[i].symbol] = static_cast<std::int32_t>(i);
}

bool huffman_table::contains(std::uint16_t symbol) const {
    return symbol < encode_index_.size() && encode_index_[symbol] >= 0;
}

void huffman_table::encode_symbol(bit_writer& bw, std::uint16_t symbol) const {
    if (!contains(symbol))
        throw argument_error("symbol " + std::to_string(symbol) + " not in huffman table");
    const entry& e = entries_[encode_index_[symbol]];
    bw.put_bits(e.code, e.length);
}

std::uint16_t huffman_table::decode_symbol(bit_reader& br) const {
    if (entries_.empty())
        throw decode_error("decode with empty huffman table", br.error_offset());
    std::uint64_t code = 0;
    std::uint8_t len = 0;
    for (const level& lv : levels_) {
        while (len < lv.len) {
            code = (code << 1) | (br.get_bit() ? 1u : 0u);
            ++len;
        }
        if (code >= lv.first_code && code - lv.first_code < lv.count)
            return entries_[lv.offset + (code - lv.first_code)].symbol;
    }
    throw decode_error("invalid huffman codeword", br.error_offset());
}

void huffman_table::encode(bit_writer& bw, const std::vector<std::uint16_t>& symbols) const {
    for (std::uint16_t s : symbols)
        encode_symbol(bw, s);
}

std::vector<std::uint16_t> huffman_table::decode(bit_reader& br, std::size_t n_symbols) const {
    std::vector<std::uint16_t> symbols;
    symbols.reserve(n_symbols);
    for (std::size_t i = 0; i < n_symbols; ++i)
        symbols.push_back(decode_symbol(br));
    return symbols;
}

double huffman_table::kraft_sum() const {
    double sum = 0.0;
    for (auto [sym, len] : lengths_)
        sum += std::ldexp(1.0, -static_cast<int>(len));
    return sum;
}

} // namespace evlec
