#pragma once

#include <span>
#include <vector>

namespace uwsim {

/// Unnormalized taps exp(-d^2 / (2 sigma^2)) for d in [-radius, radius].
std::vector<double> gaussian_taps(double sigma, int radius);

enum class EdgePolicy {
    Truncate,    // out-of-frame taps contribute nothing (mass is lost)
    Renormalize, // in-frame tap weights are rescaled to sum to 1
};

/// Separable Gaussian blur of one row-major channel with a kernel truncated
/// at cutoff*sigma, taps normalized to unit sum. sigma == 0 copies src.
/// Accumulation is in double.
void gaussian_blur_channel(std::span<const float> src, std::span<float> dst,
                           int height, int width, double sigma,
                           double cutoff, EdgePolicy edges);

} // namespace uwsim
