#pragma once

#include "evlec/entropy.hpp"
#include "evlec/events.hpp"
#include "evlec/quadtree.hpp"

#include <vector>

namespace evlec {

// Poisson disk radii per block side: r(2^m) = (m - 1) * r4 for m >= 2,
// i.e. r4, 2*r4 for side 8, 3*r4 for side 16, 4*r4 for side 32, and the
// arithmetic progression continues above that. Sides below 4 are never
// sampled.
struct radius_schedule {
    double r4 = 1.0;

    // 0 for sides < 4 (meaning: do not sample)
    double radius_for_side(int side) const;
};

// The occupied location at minimum total Euclidean distance to all occupied
// locations; ties broken by smallest (y, x).
cell_location geometric_median_event(const std::vector<cell_location>& locations);

// One thinning pass over the occupied locations of one block: seed at the
// geometric median, repeatedly delete unvisited locations closer than r to
// the current reference, then hop to the nearest unvisited survivor.
// Survivors keep their full histogram counts.
std::vector<cell_location> poisson_disk_sample(const std::vector<cell_location>& locations,
                                               double r);

struct sample_log_entry {
    int bin = 0;
    int polarity = 0;
    int block_x = 0;
    int block_y = 0;
    int side = 0;
    double r = 0.0;
    std::size_t kept = 0;
    std::size_t removed = 0;
};

struct sample_result {
    std::vector<histogram_subframe> subframes;
    std::vector<sample_log_entry> log;
    std::uint64_t events_removed = 0; // sum of counts at deleted cells
};

// Applies poisson_disk_sample to every (bin, polarity, leaf) with leaf side
// >= 4. Sides 1 and 2 pass through untouched.
sample_result sample_volume(const std::vector<histogram_subframe>& subframes,
                            const quad_tree& tree, const radius_schedule& schedule);

} // namespace evlec
