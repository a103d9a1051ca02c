#pragma once

#include <cstdint>

#include "uwsim/image.hpp"
#include "uwsim/rng.hpp"

namespace uwsim::test {

inline ImagePlane random_image(int h, int w, std::uint64_t seed, float lo = 0.0f, float hi = 1.0f) {
    ImagePlane img(h, w);
    RngStream rng(seed, 0);
    for (float& v : img.data()) v = lo + static_cast<float>(rng.next()) * (hi - lo);
    return img;
}

inline DepthMap random_depth(int h, int w, std::uint64_t seed, double lo = 0.4, double hi = 10.0) {
    DepthMap d(h, w);
    RngStream rng(seed, 1);
    for (double& v : d.data()) v = lo + rng.next() * (hi - lo);
    return d;
}

/// Left-to-right depth ramp covering [lo, hi].
inline DepthMap ramp_depth(int h, int w, double lo, double hi) {
    DepthMap d(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            d.at(x, y) = w == 1 ? lo : lo + (hi - lo) * x / (w - 1);
        }
    }
    return d;
}

inline float max_abs_diff(const ImagePlane& a, const ImagePlane& b) {
    float m = 0.0f;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        const float d = std::abs(a.data()[i] - b.data()[i]);
        if (d > m) m = d;
    }
    return m;
}

} // namespace uwsim::test
