#include "evlec/quadtree.hpp"

#include "evlec/errors.hpp"

#include <algorithm>
#include <cmath>

namespace evlec {

int root_side_for(int width, int height) {
    if (width < 1 || height < 1)
        throw argument_error("frame dimensions must be positive");
    int side = 1;
    while (side < width || side < height)
        side *= 2;
    return side;
}

namespace {

struct block_stats {
    std::int64_t count = 0;
    std::int64_t abs_diff_sum = 0; // vs recon
    double sigma = 0.0;            // population std dev of cur
    std::uint8_t mean_u8 = 0;      // rounded block mean of cur
};

// Clips the block to the frame. sigma uses the closed form
// sqrt(max(0, E[x^2] - E[x]^2)) over exact integer sums, so the result does
// not depend on traversal order.
block_stats compute_block_stats(const image8& cur, const image8& recon, int x0, int y0,
                                int side) {
    block_stats s;
    const int x1 = std::min(x0 + side, cur.width);
    const int y1 = std::min(y0 + side, cur.height);
    std::int64_t sum = 0;
    std::int64_t sum_sq = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const int c = cur.at(x, y);
            const int r = recon.at(x, y);
            s.abs_diff_sum += std::abs(c - r);
            sum += c;
            sum_sq += static_cast<std::int64_t>(c) * c;
        }
    }
    s.count = static_cast<std::int64_t>(std::max(0, x1 - x0)) * std::max(0, y1 - y0);
    if (s.count > 0) {
        const double mean = static_cast<double>(sum) / static_cast<double>(s.count);
        const double var =
            std::max(0.0, static_cast<double>(sum_sq) / static_cast<double>(s.count) - mean * mean);
        s.sigma = std::sqrt(var);
        s.mean_u8 = static_cast<std::uint8_t>(std::clamp<long>(std::llround(mean), 0, 255));
    }
    return s;
}

double pow4(int e) {
    return std::ldexp(1.0, 2 * e);
}

int full_depth_for(int root_side) {
    int d = 0;
    while ((root_side >> d) > 1)
        ++d;
    return d;
}

} // namespace

double leaf_distortion_skip(const image8& cur, const image8& recon, int x0, int y0, int side) {
    if (!cur.same_shape(recon))
        throw argument_error("leaf_distortion_skip: frame shapes differ");
    return static_cast<double>(compute_block_stats(cur, recon, x0, y0, side).abs_diff_sum);
}

double leaf_distortion_acquire(const image8& cur, int x0, int y0, int side, int level,
                               int max_depth) {
    if (level > max_depth)
        throw argument_error("leaf_distortion_acquire: level exceeds max depth");
    block_stats s = compute_block_stats(cur, cur, x0, y0, side);
    if (s.count == 0)
        throw argument_error("leaf_distortion_acquire: empty block");
    return s.sigma * pow4(max_depth - level);
}

std::uint64_t leaf_rate(leaf_mode mode, const rate_model& model) {
    std::uint64_t bits = model.bits_structure_per_node + model.bits_mode_per_leaf;
    if (mode == leaf_mode::acquire)
        bits += model.bits_value_per_acquire_leaf;
    return bits;
}

// ---------------------------------------------------------------------------
// DP optimizer
// ---------------------------------------------------------------------------

namespace {

struct dp_record {
    double j = 0.0;
    double distortion = 0.0;
    std::uint64_t rate = 0;
    qt_node::state_t choice = qt_node::state_t::leaf_skip;
    std::int32_t child_rec[4] = {-1, -1, -1, -1};
    std::uint8_t acquire_value = 0;
};

struct dp_context {
    const image8* cur = nullptr;
    const image8* recon = nullptr;
    double lambda = 0.0;
    rate_model model;
    int max_depth = 0;
    std::vector<dp_record> records;

    // Children are evaluated in TL,TR,BL,BR order; the split cost folds the
    // four child costs left to right (the oracle tests rely on the exact
    // same fold).
    std::int32_t solve(int x0, int y0, int side, int level) {
        const block_stats stats = compute_block_stats(*cur, *recon, x0, y0, side);

        dp_record rec;
        rec.acquire_value = stats.mean_u8;

        const std::uint64_t r_skip = leaf_rate(leaf_mode::skip, model);
        const double d_skip = static_cast<double>(stats.abs_diff_sum);
        rec.j = d_skip + lambda * static_cast<double>(r_skip);
        rec.distortion = d_skip;
        rec.rate = r_skip;
        rec.choice = qt_node::state_t::leaf_skip;

        // padding-only blocks have no pixels; skip is the cheaper no-op
        if (stats.count > 0) {
            const std::uint64_t r_acq = leaf_rate(leaf_mode::acquire, model);
            const double d_acq = stats.sigma * pow4(max_depth - level);
            const double j_acq = d_acq + lambda * static_cast<double>(r_acq);
            if (j_acq < rec.j) {
                rec.j = j_acq;
                rec.distortion = d_acq;
                rec.rate = r_acq;
                rec.choice = qt_node::state_t::leaf_acquire;
            }
        }

        if (level < max_depth) {
            const int h = side / 2;
            rec.child_rec[0] = solve(x0, y0, h, level + 1);
            rec.child_rec[1] = solve(x0 + h, y0, h, level + 1);
            rec.child_rec[2] = solve(x0, y0 + h, h, level + 1);
            rec.child_rec[3] = solve(x0 + h, y0 + h, h, level + 1);
            double j_split = records[rec.child_rec[0]].j;
            j_split += records[rec.child_rec[1]].j;
            j_split += records[rec.child_rec[2]].j;
            j_split += records[rec.child_rec[3]].j;
            j_split += lambda * static_cast<double>(model.bits_structure_per_node);
            if (j_split < rec.j) {
                double d_split = records[rec.child_rec[0]].distortion;
                d_split += records[rec.child_rec[1]].distortion;
                d_split += records[rec.child_rec[2]].distortion;
                d_split += records[rec.child_rec[3]].distortion;
                std::uint64_t r_split = records[rec.child_rec[0]].rate +
                                        records[rec.child_rec[1]].rate +
                                        records[rec.child_rec[2]].rate +
                                        records[rec.child_rec[3]].rate +
                                        model.bits_structure_per_node;
                rec.j = j_split;
                rec.distortion = d_split;
                rec.rate = r_split;
                rec.choice = qt_node::state_t::split;
            }
        }
        records.push_back(rec);
        return static_cast<std::int32_t>(records.size()) - 1;
    }
};

} // namespace

quad_tree optimize_tree(const image8& cur, const image8& recon, double lambda,
                        const rate_model& model, int max_depth) {
    if (!cur.same_shape(recon))
        throw argument_error("optimize_tree: frame shapes differ");
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw argument_error("optimize_tree: lambda must be finite and >= 0");

    quad_tree tree;
    tree.width = cur.width;
    tree.height = cur.height;
    tree.root_side = root_side_for(cur.width, cur.height);
    tree.max_depth = std::clamp(max_depth, 0, full_depth_for(tree.root_side));
    tree.lambda_star = lambda;

    dp_context ctx;
    ctx.cur = &cur;
    ctx.recon = &recon;
    ctx.lambda = lambda;
    ctx.model = model;
    ctx.max_depth = tree.max_depth;
    const std::int32_t root_rec = ctx.solve(0, 0, tree.root_side, 0);

    // extract the chosen subtree in preorder
    struct frame_item {
        std::int32_t rec;
        int x0, y0, side, level;
        std::int32_t parent;
        std::int32_t parent_slot;
    };
    std::vector<frame_item> stack{{root_rec, 0, 0, tree.root_side, 0, -1, 0}};
    while (!stack.empty()) {
        frame_item item = stack.back();
        stack.pop_back();
        const dp_record& rec = ctx.records[item.rec];
        qt_node node;
        node.level = item.level;
        node.x0 = item.x0;
        node.y0 = item.y0;
        node.side = item.side;
        node.state = rec.choice;
        node.distortion = rec.distortion;
        node.rate_bits = rec.rate;
        node.acquire_value =
            rec.choice == qt_node::state_t::leaf_acquire ? rec.acquire_value : std::uint8_t{0};
        const std::int32_t node_idx = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back(node);
        if (item.parent >= 0)
            tree.nodes[item.parent].child[item.parent_slot] = node_idx;
        if (rec.choice == qt_node::state_t::split) {
            const int h = item.side / 2;
            const int child_xy[4][2] = {{item.x0, item.y0},
                                        {item.x0 + h, item.y0},
                                        {item.x0, item.y0 + h},
                                        {item.x0 + h, item.y0 + h}};
            for (int k = 3; k >= 0; --k) // reversed so TL pops first
                stack.push_back(frame_item{rec.child_rec[k], child_xy[k][0], child_xy[k][1], h,
                                           item.level + 1, node_idx, k});
        }
    }

    tree.total_distortion = tree.nodes.front().distortion;
    tree.total_rate_bits = tree.nodes.front().rate_bits;
    return tree;
}

rate_control_result optimize_rate(const image8& cur, const image8& recon, std::uint64_t r_max,
                                  const rate_model& model, int max_depth, double tolerance,
                                  int max_iters) {
    if (tolerance <= 0.0)
        throw argument_error("optimize_rate: tolerance must be positive");
    const std::uint64_t min_rate = leaf_rate(leaf_mode::skip, model);
    if (r_max < min_rate)
        throw infeasible_error("r_max " + std::to_string(r_max) +
                               " below the single-root tree rate " + std::to_string(min_rate));

    rate_control_result result;
    int iters = 0;

    auto evaluate = [&](double lambda) {
        ++iters;
        return optimize_tree(cur, recon, lambda, model, max_depth);
    };

    const double target_low = (1.0 - tolerance) * static_cast<double>(r_max);
    quad_tree best;
    bool have_best = false;
    auto consider = [&](quad_tree&& t) {
        if (t.total_rate_bits <= r_max &&
            (!have_best || t.total_rate_bits > best.total_rate_bits)) {
            best = std::move(t);
            have_best = true;
        }
    };

    quad_tree unconstrained = evaluate(0.0);
    if (unconstrained.total_rate_bits <= r_max) {
        result.tree = std::move(unconstrained);
        result.lambda_star = 0.0;
        result.hit_tolerance = true;
        result.iterations = iters;
        return result;
    }

    // bracket: R(lambda) is non-increasing, so grow lambda until feasible
    double lo = 0.0;  // infeasible side
    double hi = 1.0;
    for (;;) {
        quad_tree t = evaluate(hi);
        const bool feasible = t.total_rate_bits <= r_max;
        if (feasible) {
            consider(std::move(t));
            break;
        }
        lo = hi;
        hi *= 8.0;
        if (hi > 1e30)
            throw infeasible_error("rate target not reachable while raising lambda");
    }

    double lambda_best = hi;
    while (iters < max_iters) {
        if (have_best && static_cast<double>(best.total_rate_bits) >= target_low)
            break;
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi))
            break; // interval exhausted at double precision
        quad_tree t = evaluate(mid);
        if (t.total_rate_bits <= r_max) {
            hi = mid;
            if (!have_best || t.total_rate_bits > best.total_rate_bits)
                lambda_best = mid;
            consider(std::move(t));
        } else {
            lo = mid;
        }
    }

    if (!have_best) {
        // hi end of the bracket is always feasible
        best = evaluate(hi);
        lambda_best = hi;
    }
    result.hit_tolerance = static_cast<double>(best.total_rate_bits) >= target_low;
    result.lambda_star = lambda_best;
    result.tree = std::move(best);
    result.tree.lambda_star = lambda_best;
    result.iterations = iters;
    return result;
}

// ---------------------------------------------------------------------------
// Views, reconstruction, serialization
// ---------------------------------------------------------------------------

std::vector<qt_leaf> quad_tree::leaves() const {
    std::vector<qt_leaf> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const qt_node& n = nodes[i];
        if (n.is_leaf())
            out.push_back(qt_leaf{n.x0, n.y0, n.side, n.mode(), static_cast<std::int32_t>(i)});
    }
    return out;
}

std::vector<qt_leaf> quad_tree::leaves_raster_order() const {
    std::vector<qt_leaf> out = leaves();
    std::sort(out.begin(), out.end(), [](const qt_leaf& a, const qt_leaf& b) {
        return a.y0 != b.y0 ? a.y0 < b.y0 : a.x0 < b.x0;
    });
    return out;
}

leaf_map build_leaf_map(const quad_tree& tree) {
    leaf_map map;
    map.width = tree.width;
    map.height = tree.height;
    const std::size_t n = static_cast<std::size_t>(tree.width) * tree.height;
    map.side.assign(n, 0);
    map.mode.assign(n, 0);
    map.leaf.assign(n, -1);
    const std::vector<qt_leaf> ls = tree.leaves();
    for (std::size_t li = 0; li < ls.size(); ++li) {
        const qt_leaf& leaf = ls[li];
        const int x1 = std::min(leaf.x0 + leaf.side, tree.width);
        const int y1 = std::min(leaf.y0 + leaf.side, tree.height);
        for (int y = leaf.y0; y < y1; ++y) {
            for (int x = leaf.x0; x < x1; ++x) {
                const std::size_t idx = static_cast<std::size_t>(y) * tree.width + x;
                map.side[idx] = leaf.side;
                map.mode[idx] = static_cast<std::uint8_t>(leaf.mode);
                map.leaf[idx] = static_cast<std::int32_t>(li);
            }
        }
    }
    return map;
}

image8 reconstruct(const quad_tree& tree, const image8& prev_recon) {
    if (prev_recon.width != tree.width || prev_recon.height != tree.height)
        throw argument_error("reconstruct: frame shape mismatch");
    image8 out = prev_recon;
    for (const qt_node& n : tree.nodes) {
        if (n.state != qt_node::state_t::leaf_acquire)
            continue;
        const int x1 = std::min(n.x0 + n.side, tree.width);
        const int y1 = std::min(n.y0 + n.side, tree.height);
        for (int y = n.y0; y < y1; ++y)
            for (int x = n.x0; x < x1; ++x)
                out.at(x, y) = n.acquire_value;
    }
    return out;
}

quad_tree uniform_tree(int width, int height, int leaf_side, const rate_model& model) {
    if (leaf_side < 1)
        throw argument_error("uniform_tree: leaf side must be >= 1");
    quad_tree tree;
    tree.width = width;
    tree.height = height;
    tree.root_side = root_side_for(width, height);
    const int side = std::min(leaf_side, tree.root_side);
    int depth = 0;
    while ((tree.root_side >> depth) > side)
        ++depth;
    tree.max_depth = depth;
    tree.lambda_star = 0.0;

    struct frame_item {
        int x0, y0, side, level;
        std::int32_t parent;
        int slot;
    };
    std::vector<frame_item> stack{{0, 0, tree.root_side, 0, -1, 0}};
    while (!stack.empty()) {
        frame_item item = stack.back();
        stack.pop_back();
        qt_node node;
        node.level = item.level;
        node.x0 = item.x0;
        node.y0 = item.y0;
        node.side = item.side;
        node.state =
            item.level == depth ? qt_node::state_t::leaf_skip : qt_node::state_t::split;
        const std::int32_t idx = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back(node);
        if (item.parent >= 0)
            tree.nodes[item.parent].child[item.slot] = idx;
        if (node.state == qt_node::state_t::split) {
            const int h = item.side / 2;
            const int child_xy[4][2] = {{item.x0, item.y0},
                                        {item.x0 + h, item.y0},
                                        {item.x0, item.y0 + h},
                                        {item.x0 + h, item.y0 + h}};
            for (int k = 3; k >= 0; --k)
                stack.push_back(
                    frame_item{child_xy[k][0], child_xy[k][1], h, item.level + 1, idx, k});
        }
    }

    // fill subtree rates bottom-up (nodes are preorder: children after parents,
    // so iterate in reverse)
    for (auto it = tree.nodes.rbegin(); it != tree.nodes.rend(); ++it) {
        if (it->is_leaf()) {
            it->rate_bits = leaf_rate(it->mode(), model);
        } else {
            it->rate_bits = model.bits_structure_per_node;
            for (int k = 0; k < 4; ++k)
                it->rate_bits += tree.nodes[it->child[k]].rate_bits;
        }
        it->distortion = 0.0;
    }
    tree.total_rate_bits = tree.nodes.front().rate_bits;
    tree.total_distortion = 0.0;
    return tree;
}

void serialize_qt(const quad_tree& tree, bit_writer& bw) {
    // preorder over child links
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const std::int32_t idx = stack.back();
        stack.pop_back();
        const qt_node& n = tree.nodes[idx];
        bw.put_bit(n.state == qt_node::state_t::split);
        if (n.state == qt_node::state_t::split) {
            for (int k = 3; k >= 0; --k)
                stack.push_back(n.child[k]);
        } else {
            bw.put_bit(n.state == qt_node::state_t::leaf_acquire);
            if (n.state == qt_node::state_t::leaf_acquire)
                bw.put_bits(n.acquire_value, 8);
        }
    }
}

quad_tree deserialize_qt(bit_reader& br, int width, int height, int max_depth,
                         const rate_model& model) {
    quad_tree tree;
    tree.width = width;
    tree.height = height;
    tree.root_side = root_side_for(width, height);
    tree.max_depth = std::clamp(max_depth, 0, full_depth_for(tree.root_side));

    struct frame_item {
        int x0, y0, side, level;
        std::int32_t parent;
        int slot;
    };
    std::vector<frame_item> stack{{0, 0, tree.root_side, 0, -1, 0}};
    while (!stack.empty()) {
        frame_item item = stack.back();
        stack.pop_back();
        const bool split = br.get_bit();
        if (split && item.level >= tree.max_depth)
            throw decode_error("quad tree splits past max depth", br.error_offset());
        qt_node node;
        node.level = item.level;
        node.x0 = item.x0;
        node.y0 = item.y0;
        node.side = item.side;
        if (split) {
            node.state = qt_node::state_t::split;
        } else {
            node.state = br.get_bit() ? qt_node::state_t::leaf_acquire
                                      : qt_node::state_t::leaf_skip;
            if (node.state == qt_node::state_t::leaf_acquire)
                node.acquire_value = static_cast<std::uint8_t>(br.get_bits(8));
        }
        const std::int32_t idx = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back(node);
        if (item.parent >= 0)
            tree.nodes[item.parent].child[item.slot] = idx;
        if (split) {
            const int h = item.side / 2;
            const int child_xy[4][2] = {{item.x0, item.y0},
                                        {item.x0 + h, item.y0},
                                        {item.x0, item.y0 + h},
                                        {item.x0 + h, item.y0 + h}};
            for (int k = 3; k >= 0; --k)
                stack.push_back(
                    frame_item{child_xy[k][0], child_xy[k][1], h, item.level + 1, idx, k});
        }
    }

    for (auto it = tree.nodes.rbegin(); it != tree.nodes.rend(); ++it) {
        if (it->is_leaf()) {
            it->rate_bits = leaf_rate(it->mode(), model);
        } else {
            it->rate_bits = model.bits_structure_per_node;
            for (int k = 0; k < 4; ++k)
                it->rate_bits += tree.nodes[it->child[k]].rate_bits;
        }
    }
    tree.total_rate_bits = tree.nodes.front().rate_bits;
    return tree;
}

} // namespace evlec
