#include "evlec/events.hpp"

#include "evlec/errors.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace evlec {

std::uint64_t histogram_subframe::total() const {
    std::uint64_t sum = 0;
    for (std::uint32_t c : counts)
        sum += c;
    return sum;
}

namespace {

std::string_view next_token(std::string_view& rest) {
    std::size_t begin = rest.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        rest = {};
        return {};
    }
    std::size_t end = rest.find_first_of(" \t\r", begin);
    std::string_view tok = rest.substr(begin, end == std::string_view::npos ? end : end - begin);
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
    return tok;
}

bool parse_double(std::string_view tok, double& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

bool parse_int(std::string_view tok, long& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

} // namespace

std::vector<event> load_events(std::istream& in, std::optional<frame_dims> dims) {
    std::vector<event> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest(line);
        std::string_view t_tok = next_token(rest);
        if (t_tok.empty())
            continue; // blank line

        std::string_view x_tok = next_token(rest);
        std::string_view y_tok = next_token(rest);
        std::string_view p_tok = next_token(rest);
        std::string_view extra = next_token(rest);

        double t = 0.0;
        long x = 0, y = 0, p = 0;
        if (!extra.empty() || !parse_double(t_tok, t) || !parse_int(x_tok, x) ||
            !parse_int(y_tok, y) || !parse_int(p_tok, p))
            throw parse_error("malformed event line '" + line + "'", line_no);
        if (t < 0.0 || x < 0 || y < 0)
            throw parse_error("negative event field", line_no);
        if (p != 0 && p != 1 && p != -1)
            throw parse_error("polarity must be in {0,1} or {-1,1}, got " + std::to_string(p),
                              line_no);
        if (dims && (x >= dims->width || y >= dims->height))
            throw parse_error("event coordinate (" + std::to_string(x) + "," + std::to_string(y) +
                                  ") outside " + std::to_string(dims->width) + "x" +
                                  std::to_string(dims->height) + " frame",
                              line_no);
        events.push_back(event{static_cast<int>(x), static_cast<int>(y), t, p == 0 ? -1 : static_cast<int>(p)});
    }
    return events;
}

std::vector<event> load_events(const std::filesystem::path& path, std::optional<frame_dims> dims) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open " + path.string());
    return load_events(in, dims);
}

std::vector<frame_entry> load_frame_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open " + path.string());
    std::vector<frame_entry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest(line);
        std::string_view t_tok = next_token(rest);
        if (t_tok.empty())
            continue;
        std::string_view name_tok = next_token(rest);
        double t = 0.0;
        if (name_tok.empty() || !parse_double(t_tok, t))
            throw parse_error("malformed frame-list line '" + line + "'", line_no);
        entries.push_back(frame_entry{t, std::string(name_tok)});
    }
    return entries;
}

slice_result slice_volumes(const std::vector<event>& events,
                           const std::vector<double>& frame_times, int width, int height) {
    if (frame_times.size() < 2)
        throw argument_error("slice_volumes needs at least two frame times");
    for (std::size_t i = 1; i < frame_times.size(); ++i)
        if (!(frame_times[i - 1] < frame_times[i]))
            throw argument_error("frame times must be strictly increasing");

    slice_result result;
    result.volumes.reserve(frame_times.size() - 1);
    for (std::size_t i = 0; i + 1 < frame_times.size(); ++i) {
        event_volume v;
        v.width = width;
        v.height = height;
        v.t_start = frame_times[i];
        v.t_end = frame_times[i + 1];
        result.volumes.push_back(std::move(v));
    }

    const double first = frame_times.front();
    const double last = frame_times.back();
    for (const event& e : events) {
        if (e.t < first || e.t >= last) {
            ++result.dropped;
            continue;
        }
        // index of the last frame time <= t
        auto it = std::upper_bound(frame_times.begin(), frame_times.end(), e.t);
        std::size_t idx = static_cast<std::size_t>(it - frame_times.begin()) - 1;
        result.volumes[idx].events.push_back(e);
    }
    for (event_volume& v : result.volumes)
        std::stable_sort(v.events.begin(), v.events.end(),
                         [](const event& a, const event& b) { return a.t < b.t; });
    return result;
}

double bin_start_time(const event_volume& volume, int t_bin, int bin) {
    return volume.t_start + bin * (volume.duration() / t_bin);
}

binned_volume bin_events(const event_volume& volume, int t_bin, t_quant_mode mode) {
    if (t_bin < 1)
        throw argument_error("t_bin must be >= 1");

    binned_volume out;
    out.t_bin = t_bin;
    out.subframes.reserve(2 * static_cast<std::size_t>(t_bin));
    for (int bin = 0; bin < t_bin; ++bin) {
        for (int p : {+1, -1}) {
            histogram_subframe sf;
            sf.bin_index = bin;
            sf.polarity = p;
            sf.width = volume.width;
            sf.height = volume.height;
            sf.counts.assign(static_cast<std::size_t>(volume.width) * volume.height, 0);
            out.subframes.push_back(std::move(sf));
        }
    }

    const double span = volume.duration();
    const double dt = span / t_bin;
    out.bin_of_event.reserve(volume.events.size());
    out.t_quant_of_event.reserve(volume.events.size());
    for (const event& e : volume.events) {
        int bin = static_cast<int>(std::floor(t_bin * (e.t - volume.t_start) / span));
        bin = std::clamp(bin, 0, t_bin - 1);
        const double t_quant =
            mode == t_quant_mode::start ? volume.t_start + bin * dt : volume.t_start + (bin + 0.5) * dt;
        out.bin_of_event.push_back(bin);
        out.t_quant_of_event.push_back(t_quant);
        histogram_subframe& sf = out.subframes[2 * static_cast<std::size_t>(bin) + (e.p > 0 ? 0 : 1)];
        ++sf.at(e.x, e.y);
    }
    return out;
}

} // namespace evlec
