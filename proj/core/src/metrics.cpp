#include "evlec/metrics.hpp"

#include "evlec/errors.hpp"

#include <algorithm>
#include <cmath>

namespace evlec {

aggregated_event_image aggregate_events(const std::vector<histogram_subframe>& subframes) {
    aggregated_event_image agg;
    if (subframes.empty())
        return agg;
    agg.width = subframes.front().width;
    agg.height = subframes.front().height;
    agg.values.assign(static_cast<std::size_t>(agg.width) * agg.height, 0);
    for (const histogram_subframe& sf : subframes) {
        if (sf.width != agg.width || sf.height != agg.height)
            throw argument_error("aggregate_events: subframe shapes differ");
        const std::int64_t sign = sf.polarity > 0 ? 1 : -1;
        for (std::size_t i = 0; i < sf.counts.size(); ++i)
            agg.values[i] += sign * sf.counts[i];
    }
    return agg;
}

image8 normalize_aggregate(const aggregated_event_image& agg) {
    image8 img(agg.width, agg.height);
    for (std::size_t i = 0; i < agg.values.size(); ++i) {
        const std::int64_t clipped = std::clamp<std::int64_t>(agg.values[i], -127, 128);
        img.pixels[i] = static_cast<std::uint8_t>(clipped + 127);
    }
    return img;
}

double t_error(const std::vector<timestamp_pairs>& frames) {
    if (frames.empty())
        throw argument_error("t_error: no frames");
    double total = 0.0;
    for (const timestamp_pairs& frame : frames) {
        double sq_sum = 0.0;
        for (const auto& [t_org, t_quant] : frame) {
            const double d = t_org - t_quant;
            sq_sum += d * d;
        }
        total += std::sqrt(sq_sum);
    }
    return total / static_cast<double>(frames.size());
}

double psnr(const image8& a, const image8& b, double cap_db) {
    if (!a.same_shape(b))
        throw argument_error("psnr: image shapes differ");
    if (a.pixels.empty())
        throw argument_error("psnr: empty images");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        mse += d * d;
    }
    mse /= static_cast<double>(a.pixels.size());
    if (mse == 0.0)
        return cap_db;
    return std::min(cap_db, 10.0 * std::log10(255.0 * 255.0 / mse));
}

namespace {

// SSIM of one window, population statistics.
double ssim_window(const image8& a, const image8& b, int x0, int y0, int w, int h) {
    const double n = static_cast<double>(w) * h;
    double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
            const double va = a.at(x, y);
            const double vb = b.at(x, y);
            sum_a += va;
            sum_b += vb;
            sum_aa += va * va;
            sum_bb += vb * vb;
            sum_ab += va * vb;
        }
    }
    const double mu_a = sum_a / n;
    const double mu_b = sum_b / n;
    const double var_a = std::max(0.0, sum_aa / n - mu_a * mu_a);
    const double var_b = std::max(0.0, sum_bb / n - mu_b * mu_b);
    const double cov = sum_ab / n - mu_a * mu_b;

    constexpr double k1 = 0.01, k2 = 0.03, l = 255.0;
    constexpr double c1 = (k1 * l) * (k1 * l);
    constexpr double c2 = (k2 * l) * (k2 * l);
    return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
           ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

} // namespace

double ssim(const image8& a, const image8& b) {
    if (!a.same_shape(b))
        throw argument_error("ssim: image shapes differ");
    if (a.pixels.empty())
        throw argument_error("ssim: empty images");
    constexpr int win = 8;
    if (a.width < win || a.height < win)
        return ssim_window(a, b, 0, 0, a.width, a.height);
    double sum = 0.0;
    std::size_t windows = 0;
    for (int y = 0; y + win <= a.height; ++y) {
        for (int x = 0; x + win <= a.width; ++x) {
            sum += ssim_window(a, b, x, y, win, win);
            ++windows;
        }
    }
    return sum / static_cast<double>(windows);
}

spatial_metrics_result spatial_metrics(const std::vector<histogram_subframe>& original,
                                       const std::vector<histogram_subframe>& coded,
                                       double psnr_cap_db) {
    const image8 img_a = normalize_aggregate(aggregate_events(original));
    const image8 img_b = normalize_aggregate(aggregate_events(coded));
    if (!img_a.same_shape(img_b))
        throw argument_error("spatial_metrics: aggregate shapes differ");
    return spatial_metrics_result{psnr(img_a, img_b, psnr_cap_db), ssim(img_a, img_b)};
}

double compression_ratio(std::uint64_t n_events_original, std::uint64_t gamma_bits,
                         std::uint32_t bits_per_event) {
    if (gamma_bits == 0)
        throw argument_error("compression_ratio: gamma must be positive");
    if (n_events_original == 0)
        return 0.0;
    return static_cast<double>(bits_per_event) * static_cast<double>(n_events_original) /
           static_cast<double>(gamma_bits);
}

} // namespace evlec
