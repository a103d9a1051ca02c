#include "uwsim/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "uwsim/metrics.hpp"

namespace uwsim {

namespace {

template <typename Span>
double l1_core(Span a, Span b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
    }
    return sum / static_cast<double>(a.size());
}

void require_weight01(double w, const char* what) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw std::invalid_argument(std::string(what) + ": weight must be in [0,1]");
    }
}

void require_nonneg(double v, const char* what) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + ": component must be >= 0");
}

} // namespace

double l1_mean(const DepthMap& a, const DepthMap& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("l1_mean: dimension mismatch");
    return l1_core(std::span<const double>(a.data()), std::span<const double>(b.data()));
}
double l1_mean(const ImagePlane& a, const ImagePlane& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("l1_mean: dimension mismatch");
    return l1_core(std::span<const float>(a.data()), std::span<const float>(b.data()));
}

double ssim_loss(const DepthMap& a, const DepthMap& b) { return (1.0 - ssim(a, b)) / 2.0; }
double ssim_loss(const ImagePlane& a, const ImagePlane& b) { return (1.0 - ssim(a, b)) / 2.0; }

namespace {

template <typename Plane>
double pair_fixed_core(const Plane& a, const Plane& b, double l1w, double l2w) {
    if (l1w < 0.0 || l2w < 0.0) {
        throw std::invalid_argument("pair_loss_fixed: lambda weights must be >= 0");
    }
    return l1w * l1_mean(a, b) + l2w * ssim_loss(a, b);
}

template <typename Plane>
double pair_weighted_core(const Plane& a, const Plane& b, double w) {
    require_weight01(w, "pair_loss_weighted");
    return w * l1_mean(a, b) + (1.0 - w) * ssim_loss(a, b);
}

} // namespace

double pair_loss_fixed(const DepthMap& a, const DepthMap& b, double lambda1, double lambda2) {
    return pair_fixed_core(a, b, lambda1, lambda2);
}
double pair_loss_fixed(const ImagePlane& a, const ImagePlane& b, double lambda1, double lambda2) {
    return pair_fixed_core(a, b, lambda1, lambda2);
}

double pair_loss_weighted(const DepthMap& a, const DepthMap& b, double w) {
    return pair_weighted_core(a, b, w);
}
double pair_loss_weighted(const ImagePlane& a, const ImagePlane& b, double w) {
    return pair_weighted_core(a, b, w);
}

DepthMap depth_transform(const DepthMap& y_orig, double m) {
    if (!(m > 0.0)) throw std::invalid_argument("depth_transform: m must be > 0");
    DepthMap out(y_orig.height(), y_orig.width());
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        const double y = y_orig.data()[i];
        if (!(y > 0.0)) throw std::invalid_argument("depth_transform: depth values must be > 0");
        out.data()[i] = m / y;
    }
    return out;
}

ImagePlane residual_compose(const ImagePlane& i_initial, const ImagePlane& residue) {
    if (!i_initial.same_shape(residue)) {
        throw std::invalid_argument("residual_compose: dimension mismatch");
    }
    ImagePlane out(i_initial.height(), i_initial.width());
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = i_initial.data()[i] + residue.data()[i];
    }
    return out;
}

double total_technique1(double l_d, double l_p) {
    require_nonneg(l_d, "total_technique1");
    require_nonneg(l_p, "total_technique1");
    return l_d + l_p;
}

double total_technique2(double l_d, double l_p, double l_t) {
    require_nonneg(l_t, "total_technique2");
    return total_technique1(l_d, l_p) + l_t;
}

double total_technique3(double l_d, double l_p, double l_t, double l_g) {
    require_nonneg(l_g, "total_technique3");
    return total_technique2(l_d, l_p, l_t) + l_g;
}

double total_variant2(std::span<const double> components, std::span<const double> weights) {
    if (components.empty() || weights.size() != components.size() - 1) {
        throw std::invalid_argument("total_variant2: need len(weights) == len(components) - 1");
    }
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("total_variant2: weights must be >= 0");
        wsum += w;
    }
    if (wsum > 1.0) throw std::invalid_argument("total_variant2: weights must sum to <= 1");
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i] * components[i];
    total += (1.0 - wsum) * components.back();
    return total;
}

double batch_mean_weight(std::span<const double> per_image_weights) {
    if (per_image_weights.empty()) {
        throw std::invalid_argument("batch_mean_weight: empty batch");
    }
    double sum = 0.0;
    for (double w : per_image_weights) {
        require_weight01(w, "batch_mean_weight");
        sum += w;
    }
    return sum / static_cast<double>(per_image_weights.size());
}

} // namespace uwsim
