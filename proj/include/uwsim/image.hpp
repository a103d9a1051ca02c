#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uwsim {

/// Three-channel radiance image, planar layout (all R, then G, then B).
/// Values are nominally in [0,1]; composition arithmetic may transiently
/// exceed that range, clamping happens at export only.
class ImagePlane {
public:
    static constexpr int kChannels = 3;

    ImagePlane() = default;
    ImagePlane(int height, int width, float fill = 0.0f);

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }
    bool empty() const { return data_.empty(); }

    float& at(int x, int y, int c) { return data_[index(x, y, c)]; }
    float at(int x, int y, int c) const { return data_[index(x, y, c)]; }

    std::span<float> channel(int c) {
        return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
    }
    std::span<const float> channel(int c) const {
        return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
    }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

    bool same_shape(const ImagePlane& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }
    bool all_finite() const;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<float> data_;
};

/// Per-pixel scene distance in meters. Stored in double precision so that
/// reciprocal-style transforms stay exact to well below any stated
/// tolerance; images stay float32.
class DepthMap {
public:
    DepthMap() = default;
    DepthMap(int height, int width, double fill = 0.0);

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }
    bool empty() const { return data_.empty(); }

    double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const DepthMap& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }
    bool all_finite() const;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

/// 2x2 box average per channel; height and width must be even.
ImagePlane downsample_half(const ImagePlane& img);
DepthMap downsample_half(const DepthMap& depth);

/// Throws std::invalid_argument unless the RGB/depth pair has equal dims.
void require_matching_dims(const ImagePlane& img, const DepthMap& depth);

} // namespace uwsim
