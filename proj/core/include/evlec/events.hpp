#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace evlec {

// One sensor event. Polarity is canonically +1 / -1 after ingestion.
struct event {
    int x = 0;
    int y = 0;
    double t = 0.0; // seconds
    int p = 0;      // +1 or -1
};

// All events between two successive intensity frames, sorted by t
// (non-decreasing, ties in input order). Time interval is half-open:
// t_start <= t < t_end.
struct event_volume {
    int width = 0;
    int height = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<event> events;

    double duration() const { return t_end - t_start; }
};

// Per (time bin, polarity) 2D grid of event counts.
struct histogram_subframe {
    int bin_index = 0;
    int polarity = 0; // +1 or -1
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> counts; // y-major

    std::uint32_t at(int x, int y) const {
        return counts[static_cast<std::size_t>(y) * width + x];
    }
    std::uint32_t& at(int x, int y) {
        return counts[static_cast<std::size_t>(y) * width + x];
    }
    std::uint64_t total() const;
};

enum class t_quant_mode { start, center };

// bin_events output: 2*t_bin subframes ordered (bin 0 +, bin 0 -, bin 1 +, ...)
// plus, per input event, its bin index and quantized timestamp.
struct binned_volume {
    int t_bin = 0;
    std::vector<histogram_subframe> subframes;
    std::vector<int> bin_of_event;
    std::vector<double> t_quant_of_event;
};

// Parses the `t x y p` text format. Polarity may be {0,1} or {-1,1} on disk;
// 0 is normalized to -1. When dims is given, coordinates are range-checked.
// Malformed lines raise parse_error carrying the 1-based line number.
struct frame_dims {
    int width = 0;
    int height = 0;
};
std::vector<event> load_events(std::istream& in, std::optional<frame_dims> dims = {});
std::vector<event> load_events(const std::filesystem::path& path,
                               std::optional<frame_dims> dims = {});

// `timestamp filename` pairs, one per line.
struct frame_entry {
    double t = 0.0;
    std::string filename;
};
std::vector<frame_entry> load_frame_list(const std::filesystem::path& path);

struct slice_result {
    std::vector<event_volume> volumes; // frame_times.size() - 1 entries
    std::size_t dropped = 0;           // events outside [first, last)
};

// Volume i gets exactly the events with frame_times[i] <= t < frame_times[i+1].
slice_result slice_volumes(const std::vector<event>& events,
                           const std::vector<double>& frame_times,
                           int width, int height);

binned_volume bin_events(const event_volume& volume, int t_bin,
                         t_quant_mode mode = t_quant_mode::start);

// Bin start time for a given bin index (the default quantized timestamp).
double bin_start_time(const event_volume& volume, int t_bin, int bin);

} // namespace evlec
