#include "uwsim/image.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uwsim {

namespace {

void check_dims(int height, int width) {
    if (height < 1 || width < 1) {
        throw std::invalid_argument("image dimensions must be >= 1, got " +
                                    std::to_string(height) + "x" + std::to_string(width));
    }
}

} // namespace

ImagePlane::ImagePlane(int height, int width, float fill)
    : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(static_cast<std::size_t>(kChannels) * pixel_count(), fill);
}

bool ImagePlane::all_finite() const {
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

DepthMap::DepthMap(int height, int width, double fill)
    : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(pixel_count(), fill);
}

bool DepthMap::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

ImagePlane downsample_half(const ImagePlane& img) {
    if (img.height() % 2 != 0 || img.width() % 2 != 0) {
        throw std::invalid_argument("downsample_half requires even dimensions, got " +
                                    std::to_string(img.height()) + "x" + std::to_string(img.width()));
    }
    ImagePlane out(img.height() / 2, img.width() / 2);
    for (int c = 0; c < ImagePlane::kChannels; ++c) {
        for (int y = 0; y < out.height(); ++y) {
            for (int x = 0; x < out.width(); ++x) {
                double sum = static_cast<double>(img.at(2 * x, 2 * y, c)) +
                             img.at(2 * x + 1, 2 * y, c) +
                             img.at(2 * x, 2 * y + 1, c) +
                             img.at(2 * x + 1, 2 * y + 1, c);
                out.at(x, y, c) = static_cast<float>(sum * 0.25);
            }
        }
    }
    return out;
}

DepthMap downsample_half(const DepthMap& depth) {
    if (depth.height() % 2 != 0 || depth.width() % 2 != 0) {
        throw std::invalid_argument("downsample_half requires even dimensions, got " +
                                    std::to_string(depth.height()) + "x" + std::to_string(depth.width()));
    }
    DepthMap out(depth.height() / 2, depth.width() / 2);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            out.at(x, y) = 0.25 * (depth.at(2 * x, 2 * y) + depth.at(2 * x + 1, 2 * y) +
                                   depth.at(2 * x, 2 * y + 1) + depth.at(2 * x + 1, 2 * y + 1));
        }
    }
    return out;
}

void require_matching_dims(const ImagePlane& img, const DepthMap& depth) {
    if (img.height() != depth.height() || img.width() != depth.width()) {
        throw std::invalid_argument("RGB/depth dimension mismatch: " +
                                    std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                    " vs " +
                                    std::to_string(depth.width()) + "x" + std::to_string(depth.height()));
    }
}

} // namespace uwsim
