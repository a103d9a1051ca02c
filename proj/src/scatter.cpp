#include "uwsim/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "parallel.hpp"

namespace uwsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double prefactor(double sigma, KernelNormalization mode) {
    return mode == KernelNormalization::Verbatim ? 1.0 / (kTwoPi * sigma)
                                                 : 1.0 / (kTwoPi * sigma * sigma);
}

int window_radius(double sigma, double cutoff) {
    return std::max(1, static_cast<int>(std::ceil(cutoff * sigma)));
}

void require_shapes(const ImagePlane& clean, const DepthMap& depth, const ScatterField& k) {
    require_matching_dims(clean, depth);
    if (!clean.same_shape(k.map)) {
        throw std::invalid_argument("scattered radiance: image/field dimension mismatch");
    }
}

struct DepthBins {
    std::vector<double> centers;
    std::vector<int> assignment; // per pixel, index into centers
};

DepthBins bin_depths(const DepthMap& depth, int bins, BinStrategy strategy) {
    const auto& z = depth.data();
    const auto [mn, mx] = std::minmax_element(z.begin(), z.end());
    const double zmin = *mn;
    const double zmax = *mx;

    DepthBins out;
    out.assignment.resize(z.size());
    if (bins == 1 || zmax == zmin) {
        out.centers = {0.5 * (zmin + zmax)};
        return out; // assignment already zero-filled
    }

    if (strategy == BinStrategy::Uniform) {
        // Centers include both endpoints so scenes whose depths sit exactly on
        // them reproduce the exact path.
        const double step = (zmax - zmin) / (bins - 1);
        out.centers.resize(bins);
        for (int b = 0; b < bins; ++b) out.centers[b] = zmin + b * step;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const int b = static_cast<int>(std::llround((z[i] - zmin) / step));
            out.assignment[i] = std::clamp(b, 0, bins - 1);
        }
    } else {
        std::vector<double> sorted(z);
        std::sort(sorted.begin(), sorted.end());
        out.centers.resize(bins);
        for (int b = 0; b < bins; ++b) {
            const double q = (b + 0.5) / bins;
            const std::size_t rank = static_cast<std::size_t>(q * (sorted.size() - 1) + 0.5);
            out.centers[b] = sorted[rank];
        }
        for (std::size_t i = 0; i < z.size(); ++i) {
            // nearest center; ties resolve to the lower index
            int best = 0;
            double bestd = std::abs(z[i] - out.centers[0]);
            for (int b = 1; b < bins; ++b) {
                const double d = std::abs(z[i] - out.centers[b]);
                if (d < bestd) { bestd = d; best = b; }
            }
            out.assignment[i] = best;
        }
    }
    return out;
}

// Separable convolution of one channel with the truncated kernel
// pref * exp(-dx^2/(2s^2)) * exp(-dy^2/(2s^2)); out-of-frame taps are lost.
void convolve_deposit(const std::vector<double>& src, std::vector<double>& dst,
                      int height, int width, double sigma, double cutoff,
                      KernelNormalization mode) {
    const int r = window_radius(sigma, cutoff);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    std::vector<double> taps(2 * r + 1);
    for (int d = -r; d <= r; ++d) taps[d + r] = std::exp(-static_cast<double>(d) * d * inv2s2);
    const double pref = prefactor(sigma, mode);

    std::vector<double> tmp(src.size(), 0.0);
    for (int y = 0; y < height; ++y) {
        const double* row = src.data() + static_cast<std::size_t>(y) * width;
        double* trow = tmp.data() + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            const int lo = std::max(-r, -x);
            const int hi = std::min(r, width - 1 - x);
            double acc = 0.0;
            for (int d = lo; d <= hi; ++d) acc += taps[d + r] * row[x + d];
            trow[x] = acc;
        }
    }
    dst.assign(src.size(), 0.0);
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) {
            const int lo = std::max(-r, -y);
            const int hi = std::min(r, height - 1 - y);
            double acc = 0.0;
            for (int d = lo; d <= hi; ++d) {
                acc += taps[d + r] * tmp[static_cast<std::size_t>(y + d) * width + x];
            }
            dst[static_cast<std::size_t>(y) * width + x] = pref * acc;
        }
    }
}

} // namespace

void validate(const ScatterParams& params) {
    for (int c = 0; c < 3; ++c) {
        if (params.alpha[c] < 0.0) throw std::invalid_argument("scatter params: alpha must be >= 0");
        if (!(params.gamma[c] > 0.0)) throw std::invalid_argument("scatter params: gamma must be > 0");
    }
    if (!(params.kernel_cutoff >= 1.0)) throw std::invalid_argument("scatter params: kernel_cutoff must be >= 1");
    if (!(params.delta_sigma_eps > 0.0)) throw std::invalid_argument("scatter params: delta_sigma_eps must be > 0");
}

ScatterField scatter_likelihood(const DepthMap& depth, const ScatterParams& params) {
    validate(params);
    if (depth.empty()) throw std::invalid_argument("scatter_likelihood: empty depth map");
    ScatterField k{ImagePlane(depth.height(), depth.width())};
    for (int c = 0; c < 3; ++c) {
        auto out = k.map.channel(c);
        const double alpha = params.alpha[c];
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<float>(std::exp(-alpha * depth.data()[i]));
        }
    }
    return k;
}

double gauss_kernel_value(double x, double y, double xs, double ys,
                          double z_src, double gamma_c, KernelNormalization mode) {
    const double sigma = gamma_c * z_src;
    if (!(sigma > 0.0)) throw std::invalid_argument("gauss_kernel_value: sigma must be > 0");
    const double dx = x - xs;
    const double dy = y - ys;
    return prefactor(sigma, mode) * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

ImagePlane scattered_radiance_exact(const ImagePlane& clean, const DepthMap& depth,
                                    const ScatterField& k, const ScatterParams& params) {
    validate(params);
    require_shapes(clean, depth, k);
    const int h = clean.height();
    const int w = clean.width();
    ImagePlane out(h, w);
    std::vector<double> acc(static_cast<std::size_t>(h) * w);
    for (int c = 0; c < 3; ++c) {
        std::fill(acc.begin(), acc.end(), 0.0);
        const double gamma = params.gamma[c];
        for (int sy = 0; sy < h; ++sy) {
            for (int sx = 0; sx < w; ++sx) {
                const double weight = static_cast<double>(k.map.at(sx, sy, c)) * clean.at(sx, sy, c);
                if (weight == 0.0) continue;
                const double sigma = gamma * depth.at(sx, sy);
                if (sigma < params.delta_sigma_eps) {
                    acc[static_cast<std::size_t>(sy) * w + sx] += weight;
                    continue;
                }
                const int r = window_radius(sigma, params.kernel_cutoff);
                const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
                const double pw = prefactor(sigma, params.normalization) * weight;
                const int y0 = std::max(0, sy - r), y1 = std::min(h - 1, sy + r);
                const int x0 = std::max(0, sx - r), x1 = std::min(w - 1, sx + r);
                for (int ty = y0; ty <= y1; ++ty) {
                    const double dy2 = static_cast<double>(ty - sy) * (ty - sy);
                    double* arow = acc.data() + static_cast<std::size_t>(ty) * w;
                    for (int tx = x0; tx <= x1; ++tx) {
                        const double dx2 = static_cast<double>(tx - sx) * (tx - sx);
                        arow[tx] += pw * std::exp(-(dx2 + dy2) * inv2s2);
                    }
                }
            }
        }
        auto o = out.channel(c);
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = static_cast<float>(acc[i]);
    }
    return out;
}

ImagePlane scattered_radiance_fast(const ImagePlane& clean, const DepthMap& depth,
                                   const ScatterField& k, const ScatterParams& params,
                                   int bins, BinStrategy strategy, int threads) {
    validate(params);
    require_shapes(clean, depth, k);
    if (bins < 1) throw std::invalid_argument("scattered_radiance_fast: bins must be >= 1");

    const int h = clean.height();
    const int w = clean.width();
    const std::size_t n = static_cast<std::size_t>(h) * w;
    const DepthBins db = bin_depths(depth, bins, strategy);
    const int nbins = static_cast<int>(db.centers.size());

    // Masked weighted source image per (bin, channel), convolved independently
    // and summed in fixed bin order afterwards, so worker count cannot change
    // the result.
    std::vector<std::vector<double>> bin_out(static_cast<std::size_t>(nbins) * 3);
    detail::parallel_for(bin_out.size(), threads, [&](std::size_t task) {
        const int b = static_cast<int>(task) / 3;
        const int c = static_cast<int>(task) % 3;
        std::vector<double> masked(n, 0.0);
        bool any = false;
        const auto kc = k.map.channel(c);
        const auto jc = clean.channel(c);
        for (std::size_t i = 0; i < n; ++i) {
            if (db.assignment[i] == b) {
                const double v = static_cast<double>(kc[i]) * jc[i];
                masked[i] = v;
                if (v != 0.0) any = true;
            }
        }
        if (!any) return; // bin_out entry stays empty
        const double sigma = params.gamma[c] * db.centers[b];
        if (sigma < params.delta_sigma_eps) {
            bin_out[task] = std::move(masked);
        } else {
            convolve_deposit(masked, bin_out[task], h, w, sigma,
                             params.kernel_cutoff, params.normalization);
        }
    });

    ImagePlane out(h, w);
    for (int c = 0; c < 3; ++c) {
        std::vector<double> acc(n, 0.0);
        for (int b = 0; b < nbins; ++b) {
            const auto& part = bin_out[static_cast<std::size_t>(b) * 3 + c];
            if (part.empty()) continue;
            for (std::size_t i = 0; i < n; ++i) acc[i] += part[i];
        }
        auto o = out.channel(c);
        for (std::size_t i = 0; i < n; ++i) o[i] = static_cast<float>(acc[i]);
    }
    return out;
}

ImagePlane compose_scattered(const ImagePlane& clean, const ImagePlane& j_sct,
                             const ScatterField& k, const TransmissionMap& t,
                             const WaterProfile& profile) {
    validate(profile);
    if (!clean.same_shape(j_sct) || !clean.same_shape(k.map) || !clean.same_shape(t.map)) {
        throw std::invalid_argument("compose_scattered: dimension mismatch");
    }
    ImagePlane out(clean.height(), clean.width());
    for (int c = 0; c < 3; ++c) {
        const auto j = clean.channel(c);
        const auto js = j_sct.channel(c);
        const auto kc = k.map.channel(c);
        const auto tc = t.map.channel(c);
        auto o = out.channel(c);
        const float a = static_cast<float>(profile.veiling[c]);
        for (std::size_t i = 0; i < o.size(); ++i) {
            o[i] = (js[i] + (1.0f - kc[i]) * j[i]) * tc[i] + (1.0f - tc[i]) * a;
        }
    }
    return out;
}

} // namespace uwsim
