#pragma once

// Independent brute-force re-implementations of the metric definitions,
// written as plain scalar loops straight from the formulas. These stay
// deliberately separate from the library code paths they check.

#include <cmath>
#include <vector>

#include "uwsim/image.hpp"

namespace uwsim::test {

inline double oracle_rel(const std::vector<double>& y, const std::vector<double>& yhat) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]) / y[i];
    return s / static_cast<double>(y.size());
}

inline double oracle_rms(const std::vector<double>& y, const std::vector<double>& yhat) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return std::sqrt(s / static_cast<double>(y.size()));
}

inline double oracle_log10(const std::vector<double>& y, const std::vector<double>& yhat) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(std::log10(y[i]) - std::log10(yhat[i]));
    return s / static_cast<double>(y.size());
}

inline double oracle_delta(const std::vector<double>& y, const std::vector<double>& yhat, int i) {
    const double thresh = std::pow(1.25, i);
    std::size_t hits = 0;
    for (std::size_t p = 0; p < y.size(); ++p) {
        if (std::max(y[p] / yhat[p], yhat[p] / y[p]) < thresh) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

/// Direct windowed SSIM: for every full 11x11 window position, Gaussian
/// weighted moments computed with explicit double loops over the window.
inline double oracle_ssim_plane(const std::vector<double>& a, const std::vector<double>& b,
                                int h, int w, double dynamic_range = 1.0) {
    constexpr int win = 11;
    constexpr int r = win / 2;
    double g[win][win];
    double gsum = 0.0;
    for (int i = 0; i < win; ++i) {
        for (int j = 0; j < win; ++j) {
            const double di = i - r, dj = j - r;
            g[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
            gsum += g[i][j];
        }
    }
    for (int i = 0; i < win; ++i) {
        for (int j = 0; j < win; ++j) g[i][j] /= gsum;
    }
    const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);

    double total = 0.0;
    std::size_t count = 0;
    for (int cy = r; cy < h - r; ++cy) {
        for (int cx = r; cx < w - r; ++cx) {
            double mu_a = 0, mu_b = 0, e_aa = 0, e_bb = 0, e_ab = 0;
            for (int i = 0; i < win; ++i) {
                for (int j = 0; j < win; ++j) {
                    const double av = a[static_cast<std::size_t>(cy + i - r) * w + (cx + j - r)];
                    const double bv = b[static_cast<std::size_t>(cy + i - r) * w + (cx + j - r)];
                    mu_a += g[i][j] * av;
                    mu_b += g[i][j] * bv;
                    e_aa += g[i][j] * av * av;
                    e_bb += g[i][j] * bv * bv;
                    e_ab += g[i][j] * av * bv;
                }
            }
            const double va = e_aa - mu_a * mu_a;
            const double vb = e_bb - mu_b * mu_b;
            const double cov = e_ab - mu_a * mu_b;
            total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

inline std::vector<double> to_doubles(const DepthMap& d) { return d.data(); }

inline std::vector<double> to_doubles(const ImagePlane& img) {
    return {img.data().begin(), img.data().end()};
}

inline std::vector<double> channel_doubles(const ImagePlane& img, int c) {
    const auto s = img.channel(c);
    return {s.begin(), s.end()};
}

} // namespace uwsim::test
