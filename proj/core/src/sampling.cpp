#include "evlec/sampling.hpp"

#include "evlec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evlec {

double radius_schedule::radius_for_side(int side) const {
    if (side < 4)
        return 0.0;
    int m = 0;
    while ((1 << m) < side)
        ++m;
    return (m - 1) * r4;
}

namespace {

double dist2(const cell_location& a, const cell_location& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

bool yx_less(const cell_location& a, const cell_location& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

} // namespace

cell_location geometric_median_event(const std::vector<cell_location>& locations) {
    if (locations.empty())
        throw argument_error("geometric_median_event: empty location list");
    double best_sum = std::numeric_limits<double>::infinity();
    cell_location best = locations.front();
    for (const cell_location& cand : locations) {
        double sum = 0.0;
        for (const cell_location& other : locations)
            sum += std::sqrt(dist2(cand, other));
        if (sum < best_sum || (sum == best_sum && yx_less(cand, best))) {
            best_sum = sum;
            best = cand;
        }
    }
    return best;
}

std::vector<cell_location> poisson_disk_sample(const std::vector<cell_location>& locations,
                                               double r) {
    if (locations.empty())
        return {};
    if (r <= 0.0)
        throw argument_error("poisson_disk_sample: radius must be positive");

    const double r2 = r * r;
    enum class state : std::uint8_t { unvisited, visited, deleted };
    std::vector<state> states(locations.size(), state::unvisited);

    cell_location seed = geometric_median_event(locations);
    std::size_t ref = 0;
    for (std::size_t i = 0; i < locations.size(); ++i)
        if (locations[i] == seed) {
            ref = i;
            break;
        }

    for (;;) {
        states[ref] = state::visited;
        for (std::size_t i = 0; i < locations.size(); ++i)
            if (states[i] == state::unvisited && dist2(locations[i], locations[ref]) < r2)
                states[i] = state::deleted;

        // nearest unvisited survivor; all of them are >= r away by now
        std::size_t next = locations.size();
        double next_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < locations.size(); ++i) {
            if (states[i] != state::unvisited)
                continue;
            const double d2 = dist2(locations[i], locations[ref]);
            if (d2 < next_d2 ||
                (d2 == next_d2 && yx_less(locations[i], locations[next]))) {
                next = i;
                next_d2 = d2;
            }
        }
        if (next == locations.size())
            break;
        ref = next;
    }

    std::vector<cell_location> survivors;
    for (std::size_t i = 0; i < locations.size(); ++i)
        if (states[i] == state::visited)
            survivors.push_back(locations[i]);
    return survivors;
}

sample_result sample_volume(const std::vector<histogram_subframe>& subframes,
                            const quad_tree& tree, const radius_schedule& schedule) {
    sample_result result;
    result.subframes = subframes;
    const std::vector<qt_leaf> leaves = tree.leaves_raster_order();

    for (histogram_subframe& sf : result.subframes) {
        if (sf.width != tree.width || sf.height != tree.height)
            throw argument_error("sample_volume: subframe/tree shape mismatch");
        for (const qt_leaf& leaf : leaves) {
            const double r = schedule.radius_for_side(leaf.side);
            if (r <= 0.0)
                continue;
            const int x1 = std::min(leaf.x0 + leaf.side, tree.width);
            const int y1 = std::min(leaf.y0 + leaf.side, tree.height);
            std::vector<cell_location> occupied;
            for (int y = leaf.y0; y < y1; ++y)
                for (int x = leaf.x0; x < x1; ++x)
                    if (sf.at(x, y) > 0)
                        occupied.push_back(cell_location{x, y});
            if (occupied.empty())
                continue;

            const std::vector<cell_location> survivors = poisson_disk_sample(occupied, r);
            if (survivors.size() < occupied.size()) {
                std::vector<bool> keep(occupied.size(), false);
                std::size_t si = 0;
                for (std::size_t i = 0; i < occupied.size(); ++i) {
                    // both lists are raster-ordered subsets of the block scan
                    if (si < survivors.size() && occupied[i] == survivors[si]) {
                        keep[i] = true;
                        ++si;
                    }
                }
                for (std::size_t i = 0; i < occupied.size(); ++i)
                    if (!keep[i]) {
                        result.events_removed += sf.at(occupied[i].x, occupied[i].y);
                        sf.at(occupied[i].x, occupied[i].y) = 0;
                    }
            }
            result.log.push_back(sample_log_entry{sf.bin_index, sf.polarity, leaf.x0, leaf.y0,
                                                  leaf.side, r, survivors.size(),
                                                  occupied.size() - survivors.size()});
        }
    }
    return result;
}

} // namespace evlec
