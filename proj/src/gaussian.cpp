#include "uwsim/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwsim {

std::vector<double> gaussian_taps(double sigma, int radius) {
    if (sigma <= 0.0) throw std::invalid_argument("gaussian_taps: sigma must be > 0");
    if (radius < 0) throw std::invalid_argument("gaussian_taps: radius must be >= 0");
    std::vector<double> taps(2 * radius + 1);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (int d = -radius; d <= radius; ++d) {
        taps[d + radius] = std::exp(-static_cast<double>(d) * d * inv2s2);
    }
    return taps;
}

namespace {

// One 1-D pass along x of a row-major plane; `transposed` output swaps axes
// so the second pass can reuse the same loop.
void pass_1d(const std::vector<double>& src, std::vector<double>& dst,
             int height, int width, const std::vector<double>& taps,
             int radius, EdgePolicy edges) {
    dst.assign(src.size(), 0.0);
    for (int y = 0; y < height; ++y) {
        const double* row = src.data() + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            double wsum = 0.0;
            const int lo = std::max(-radius, -x);
            const int hi = std::min(radius, width - 1 - x);
            for (int d = lo; d <= hi; ++d) {
                const double w = taps[d + radius];
                acc += w * row[x + d];
                wsum += w;
            }
            if (edges == EdgePolicy::Renormalize && wsum > 0.0) acc /= wsum;
            // transposed store: dst is width x height
            dst[static_cast<std::size_t>(x) * height + y] = acc;
        }
    }
}

} // namespace

void gaussian_blur_channel(std::span<const float> src, std::span<float> dst,
                           int height, int width, double sigma,
                           double cutoff, EdgePolicy edges) {
    const std::size_t n = static_cast<std::size_t>(height) * width;
    if (src.size() != n || dst.size() != n) {
        throw std::invalid_argument("gaussian_blur_channel: span size mismatch");
    }
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur_channel: sigma must be >= 0");
    if (sigma == 0.0) {
        std::copy(src.begin(), src.end(), dst.begin());
        return;
    }
    const int radius = std::max(1, static_cast<int>(std::ceil(cutoff * sigma)));
    std::vector<double> taps = gaussian_taps(sigma, radius);
    double sum = 0.0;
    for (double t : taps) sum += t;
    for (double& t : taps) t /= sum;

    std::vector<double> a(src.begin(), src.end());
    std::vector<double> b;
    pass_1d(a, b, height, width, taps, radius, edges); // now width x height
    pass_1d(b, a, width, height, taps, radius, edges); // back to height x width
    for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<float>(a[i]);
}

} // namespace uwsim
