#pragma once

#include <cstddef>
#include <string>

#include "uwsim/image.hpp"

namespace uwsim {

struct MetricsReport {
    double rel = 0.0;
    double rms = 0.0;
    double log10_err = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    double ssim = 0.0;
    std::size_t n_pixels = 0;

    std::string to_kv() const;          // one "key=value" line
    std::string to_json_string() const; // one JSON object
};

// Depth-style error metrics. The reference plane y is the denominator of
// rel and must be strictly positive; log10 and the threshold accuracies
// need both planes positive. All reductions accumulate in double in fixed
// order. Each metric is offered on depth maps and on RGB planes (the RGB
// form runs over all channels).

double rel_error(const DepthMap& y, const DepthMap& y_hat);
double rel_error(const ImagePlane& y, const ImagePlane& y_hat);

double rms_error(const DepthMap& y, const DepthMap& y_hat);
double rms_error(const ImagePlane& y, const ImagePlane& y_hat);

double log10_error(const DepthMap& y, const DepthMap& y_hat);
double log10_error(const ImagePlane& y, const ImagePlane& y_hat);

/// Fraction of pixels whose two-sided ratio max(y/y_hat, y_hat/y) is
/// strictly below 1.25^i, i in {1,2,3}.
double delta_accuracy(const DepthMap& y, const DepthMap& y_hat, int i);
double delta_accuracy(const ImagePlane& y, const ImagePlane& y_hat, int i);

/// Mean local structural similarity with an 11x11 Gaussian window
/// (sigma 1.5), stabilizers C1=(0.01 L)^2 and C2=(0.03 L)^2, computed over
/// the valid (full-window) region. RGB planes average the per-channel
/// values. Throws if either dimension is below the window size.
double ssim(const DepthMap& a, const DepthMap& b, double dynamic_range = 1.0);
double ssim(const ImagePlane& a, const ImagePlane& b, double dynamic_range = 1.0);

/// Full suite on a pair; used per sample by the evaluation pipeline.
MetricsReport evaluate_pair(const DepthMap& y, const DepthMap& y_hat);
MetricsReport evaluate_pair(const ImagePlane& y, const ImagePlane& y_hat);

} // namespace uwsim
