#include "uwsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace uwsim {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

template <typename T>
void require_same_size(const T& a, const T& b, const char* what) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

template <typename Span>
double rel_core(Span y, Span yhat) {
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yv = y[i];
        if (!(yv > 0.0)) throw std::invalid_argument("rel_error: reference values must be > 0");
        sum += std::abs(yv - static_cast<double>(yhat[i])) / yv;
    }
    return sum / static_cast<double>(y.size());
}

template <typename Span>
double rms_core(Span y, Span yhat) {
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = static_cast<double>(y[i]) - static_cast<double>(yhat[i]);
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(y.size()));
}

template <typename Span>
double log10_core(Span y, Span yhat) {
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yv = y[i];
        const double pv = yhat[i];
        if (!(yv > 0.0) || !(pv > 0.0)) {
            throw std::invalid_argument("log10_error: values must be > 0");
        }
        sum += std::abs(std::log10(yv) - std::log10(pv));
    }
    return sum / static_cast<double>(y.size());
}

template <typename Span>
double delta_core(Span y, Span yhat, int i) {
    if (i < 1 || i > 3) throw std::invalid_argument("delta_accuracy: i must be 1, 2 or 3");
    double thresh = 1.25;
    for (int p = 1; p < i; ++p) thresh *= 1.25;
    std::size_t hits = 0;
    for (std::size_t p = 0; p < y.size(); ++p) {
        const double yv = y[p];
        const double pv = yhat[p];
        if (!(yv > 0.0) || !(pv > 0.0)) {
            throw std::invalid_argument("delta_accuracy: values must be > 0");
        }
        const double ratio = std::max(yv / pv, pv / yv);
        if (ratio < thresh) ++hits; // strict, matching the metric's definition
    }
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

// Valid-region separable filtering with a normalized 1-D window: the output
// is (h - 2r) x (w - 2r), only full-window positions.
struct ValidFilter {
    std::vector<double> taps;
    int radius;

    explicit ValidFilter(int window, double sigma) : radius(window / 2) {
        taps.resize(window);
        double sum = 0.0;
        for (int i = 0; i < window; ++i) {
            const double d = i - radius;
            taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
            sum += taps[i];
        }
        for (double& t : taps) t /= sum;
    }

    std::vector<double> apply(const std::vector<double>& src, int h, int w) const {
        const int vw = w - 2 * radius;
        const int vh = h - 2 * radius;
        std::vector<double> tmp(static_cast<std::size_t>(h) * vw);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < vw; ++x) {
                double acc = 0.0;
                for (int d = 0; d < static_cast<int>(taps.size()); ++d) {
                    acc += taps[d] * src[static_cast<std::size_t>(y) * w + x + d];
                }
                tmp[static_cast<std::size_t>(y) * vw + x] = acc;
            }
        }
        std::vector<double> out(static_cast<std::size_t>(vh) * vw);
        for (int y = 0; y < vh; ++y) {
            for (int x = 0; x < vw; ++x) {
                double acc = 0.0;
                for (int d = 0; d < static_cast<int>(taps.size()); ++d) {
                    acc += taps[d] * tmp[static_cast<std::size_t>(y + d) * vw + x];
                }
                out[static_cast<std::size_t>(y) * vw + x] = acc;
            }
        }
        return out;
    }
};

template <typename Span>
double ssim_plane(Span a, Span b, int h, int w, double dynamic_range) {
    if (h < kWindow || w < kWindow) {
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    }
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> da(n), db(n), daa(n), dbb(n), dab(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double av = a[i];
        const double bv = b[i];
        da[i] = av;
        db[i] = bv;
        daa[i] = av * av;
        dbb[i] = bv * bv;
        dab[i] = av * bv;
    }
    static const ValidFilter filter(kWindow, kWindowSigma);
    const auto mu_a = filter.apply(da, h, w);
    const auto mu_b = filter.apply(db, h, w);
    const auto e_aa = filter.apply(daa, h, w);
    const auto e_bb = filter.apply(dbb, h, w);
    const auto e_ab = filter.apply(dab, h, w);

    const double c1 = (kK1 * dynamic_range) * (kK1 * dynamic_range);
    const double c2 = (kK2 * dynamic_range) * (kK2 * dynamic_range);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i];
        const double mb = mu_b[i];
        const double va = e_aa[i] - ma * ma;
        const double vb = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
        const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
        sum += num / den;
    }
    return sum / static_cast<double>(mu_a.size());
}

} // namespace

double rel_error(const DepthMap& y, const DepthMap& y_hat) {
    require_same_size(y, y_hat, "rel_error");
    return rel_core(std::span<const double>(y.data()), std::span<const double>(y_hat.data()));
}
double rel_error(const ImagePlane& y, const ImagePlane& y_hat) {
    require_same_size(y, y_hat, "rel_error");
    return rel_core(std::span<const float>(y.data()), std::span<const float>(y_hat.data()));
}

double rms_error(const DepthMap& y, const DepthMap& y_hat) {
    require_same_size(y, y_hat, "rms_error");
    return rms_core(std::span<const double>(y.data()), std::span<const double>(y_hat.data()));
}
double rms_error(const ImagePlane& y, const ImagePlane& y_hat) {
    require_same_size(y, y_hat, "rms_error");
    return rms_core(std::span<const float>(y.data()), std::span<const float>(y_hat.data()));
}

double log10_error(const DepthMap& y, const DepthMap& y_hat) {
    require_same_size(y, y_hat, "log10_error");
    return log10_core(std::span<const double>(y.data()), std::span<const double>(y_hat.data()));
}
double log10_error(const ImagePlane& y, const ImagePlane& y_hat) {
    require_same_size(y, y_hat, "log10_error");
    return log10_core(std::span<const float>(y.data()), std::span<const float>(y_hat.data()));
}

double delta_accuracy(const DepthMap& y, const DepthMap& y_hat, int i) {
    require_same_size(y, y_hat, "delta_accuracy");
    return delta_core(std::span<const double>(y.data()), std::span<const double>(y_hat.data()), i);
}
double delta_accuracy(const ImagePlane& y, const ImagePlane& y_hat, int i) {
    require_same_size(y, y_hat, "delta_accuracy");
    return delta_core(std::span<const float>(y.data()), std::span<const float>(y_hat.data()), i);
}

double ssim(const DepthMap& a, const DepthMap& b, double dynamic_range) {
    require_same_size(a, b, "ssim");
    return ssim_plane(std::span<const double>(a.data()), std::span<const double>(b.data()),
                      a.height(), a.width(), dynamic_range);
}

double ssim(const ImagePlane& a, const ImagePlane& b, double dynamic_range) {
    require_same_size(a, b, "ssim");
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        sum += ssim_plane(a.channel(c), b.channel(c), a.height(), a.width(), dynamic_range);
    }
    return sum / 3.0;
}

namespace {

template <typename Plane>
MetricsReport evaluate_core(const Plane& y, const Plane& y_hat) {
    MetricsReport r;
    r.rel = rel_error(y, y_hat);
    r.rms = rms_error(y, y_hat);
    r.log10_err = log10_error(y, y_hat);
    r.delta1 = delta_accuracy(y, y_hat, 1);
    r.delta2 = delta_accuracy(y, y_hat, 2);
    r.delta3 = delta_accuracy(y, y_hat, 3);
    r.ssim = ssim(y, y_hat);
    r.n_pixels = y.pixel_count();
    return r;
}

} // namespace

MetricsReport evaluate_pair(const DepthMap& y, const DepthMap& y_hat) {
    return evaluate_core(y, y_hat);
}
MetricsReport evaluate_pair(const ImagePlane& y, const ImagePlane& y_hat) {
    return evaluate_core(y, y_hat);
}

std::string MetricsReport::to_kv() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "rel=%.10g rms=%.10g log10=%.10g delta1=%.10g delta2=%.10g "
                  "delta3=%.10g ssim=%.10g n_pixels=%zu",
                  rel, rms, log10_err, delta1, delta2, delta3, ssim, n_pixels);
    return buf;
}

std::string MetricsReport::to_json_string() const {
    nlohmann::json j{{"rel", rel},       {"rms", rms},       {"log10", log10_err},
                     {"delta1", delta1}, {"delta2", delta2}, {"delta3", delta3},
                     {"ssim", ssim},     {"n_pixels", n_pixels}};
    return j.dump();
}

} // namespace uwsim
