#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evlec {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition.
struct argument_error : error {
    using error::error;
};

// File system / stream failure.
struct io_error : error {
    using error::error;
};

// Malformed text input. `line` is 1-based.
struct parse_error : error {
    parse_error(const std::string& msg, std::size_t line_no)
        : error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;
};

// Malformed or corrupted bitstream. `byte_offset` points at (or just past)
// the region that failed to parse.
struct decode_error : error {
    decode_error(const std::string& msg, std::uint64_t offset)
        : error(msg + " (byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
    std::uint64_t byte_offset;
};

// The requested rate target cannot be met by any segmentation.
struct infeasible_error : error {
    using error::error;
};

} // namespace evlec
