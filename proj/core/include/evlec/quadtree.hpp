#pragma once

#include "evlec/bitio.hpp"
#include "evlec/image.hpp"

#include <cstdint>
#include <vector>

namespace evlec {

enum class leaf_mode : std::uint8_t { skip = 0, acquire = 1 };

// Bit cost model for a serialized tree: one structure (split/leaf) bit per
// node, one mode bit per leaf, and the 8-bit block mean per acquire leaf.
struct rate_model {
    std::uint32_t bits_structure_per_node = 1;
    std::uint32_t bits_mode_per_leaf = 1;
    std::uint32_t bits_value_per_acquire_leaf = 8;
};

struct qt_node {
    enum class state_t : std::uint8_t { split = 0, leaf_skip = 1, leaf_acquire = 2 };

    int level = 0; // root = 0
    int x0 = 0;
    int y0 = 0;
    int side = 0; // root_side >> level
    state_t state = state_t::leaf_skip;
    double distortion = 0.0;      // this subtree
    std::uint64_t rate_bits = 0;  // this subtree, under the build's rate model
    std::int32_t child[4] = {-1, -1, -1, -1}; // TL, TR, BL, BR
    std::uint8_t acquire_value = 0;           // rounded block mean, acquire leaves

    bool is_leaf() const { return state != state_t::split; }
    leaf_mode mode() const {
        return state == state_t::leaf_acquire ? leaf_mode::acquire : leaf_mode::skip;
    }
};

struct qt_leaf {
    int x0 = 0;
    int y0 = 0;
    int side = 0;
    leaf_mode mode = leaf_mode::skip;
    std::int32_t node = -1;
};

struct quad_tree {
    int width = 0;  // frame dims (unpadded)
    int height = 0;
    int root_side = 0; // power of two >= max(width, height)
    int max_depth = 0; // N: deepest allowed level
    double lambda_star = 0.0;
    double total_distortion = 0.0;
    std::uint64_t total_rate_bits = 0;
    std::vector<qt_node> nodes; // preorder, nodes[0] = root

    // Leaves in preorder.
    std::vector<qt_leaf> leaves() const;
    // Leaves sorted by (y0, x0); the payload block order.
    std::vector<qt_leaf> leaves_raster_order() const;
};

// Per-pixel view of the segmentation. Covers the frame rect only.
struct leaf_map {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> side;   // per pixel
    std::vector<std::uint8_t> mode;   // leaf_mode per pixel
    std::vector<std::int32_t> leaf;   // index into leaves() order

    std::int32_t side_at(int x, int y) const {
        return side[static_cast<std::size_t>(y) * width + x];
    }
};

int root_side_for(int width, int height);

// Sum over the block ∩ frame of |cur - recon|. Blocks may extend past the
// frame; the padded region contributes nothing.
double leaf_distortion_skip(const image8& cur, const image8& recon, int x0, int y0, int side);

// Population standard deviation of the block ∩ frame of `cur`, scaled by
// 4^(max_depth - level). Empty intersection is an argument error.
double leaf_distortion_acquire(const image8& cur, int x0, int y0, int side, int level,
                               int max_depth);

std::uint64_t leaf_rate(leaf_mode mode, const rate_model& model);

// Globally minimizes J(x) = D(x) + lambda * R(x) over all quad-tree
// segmentations with per-leaf skip/acquire modes, by bottom-up dynamic
// programming over the complete tree of depth max_depth.
quad_tree optimize_tree(const image8& cur, const image8& recon, double lambda,
                        const rate_model& model, int max_depth);

struct rate_control_result {
    quad_tree tree;
    double lambda_star = 0.0;
    bool hit_tolerance = false; // achieved R >= (1 - tolerance) * r_max
    int iterations = 0;
};

// Monotone bisection on lambda targeting R(x) <= r_max, aiming for
// R(x) >= (1 - tolerance) * r_max when attainable on the convex hull.
rate_control_result optimize_rate(const image8& cur, const image8& recon, std::uint64_t r_max,
                                  const rate_model& model, int max_depth, double tolerance,
                                  int max_iters);

leaf_map build_leaf_map(const quad_tree& tree);

// Next reconstructed frame: skip leaves copy `prev_recon`, acquire leaves
// take the leaf's stored 8-bit block mean of `cur`.
image8 reconstruct(const quad_tree& tree, const image8& prev_recon);

// Uniform segmentation with all leaves of the given side (all skip mode).
// Used by the temporal-only path (side 1) and the random baseline (side 16).
quad_tree uniform_tree(int width, int height, int leaf_side, const rate_model& model);

// Preorder serialization: a split bit per node; leaves add a mode bit and,
// for acquire, the 8-bit value. Bit length equals R(x) under the default
// rate model.
void serialize_qt(const quad_tree& tree, bit_writer& bw);
quad_tree deserialize_qt(bit_reader& br, int width, int height, int max_depth,
                         const rate_model& model);

} // namespace evlec
