#pragma once

#include "evlec/events.hpp"
#include "evlec/image.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace evlec {

// Signed per-pixel sum over all bins of (positive count - negative count).
struct aggregated_event_image {
    int width = 0;
    int height = 0;
    std::vector<std::int64_t> values; // y-major

    std::int64_t at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

aggregated_event_image aggregate_events(const std::vector<histogram_subframe>& subframes);

// Signed counts clipped to [-127, 128] and offset by +127 into 8-bit range.
image8 normalize_aggregate(const aggregated_event_image& agg);

// One (original, quantized) timestamp pair per surviving event.
using timestamp_pairs = std::vector<std::pair<double, double>>;

// (1/N_fr) * sum_i sqrt( sum_j (T_org - T_quant)^2 ), in seconds.
// Deleted events carry no pair and are simply absent from the inner sum.
double t_error(const std::vector<timestamp_pairs>& frames);

struct spatial_metrics_result {
    double psnr_db = 0.0;
    double ssim = 0.0;
};

// PSNR and SSIM between the normalized aggregated event images. Identical
// inputs report SSIM 1 and the PSNR cap instead of infinity. SSIM uses an
// 8x8 sliding window with K1=0.01, K2=0.03, L=255.
spatial_metrics_result spatial_metrics(const std::vector<histogram_subframe>& original,
                                       const std::vector<histogram_subframe>& coded,
                                       double psnr_cap_db = 99.0);

double psnr(const image8& a, const image8& b, double cap_db = 99.0);
double ssim(const image8& a, const image8& b);

// Eq.-style end-to-end ratio: (bits_per_event * n_events) / gamma_bits.
// n_events == 0 reports 0 by convention (flagged by callers).
double compression_ratio(std::uint64_t n_events_original, std::uint64_t gamma_bits,
                         std::uint32_t bits_per_event = 64);

} // namespace evlec
