#pragma once

#include <array>

#include "uwsim/image.hpp"
#include "uwsim/optics.hpp"
#include "uwsim/water.hpp"

namespace uwsim {

/// Kernel prefactor choice. Verbatim uses 1/(2*pi*sigma) with
/// sigma = gamma_c * z; Normalized uses 1/(2*pi*sigma^2) so the continuous
/// kernel integrates to one.
enum class KernelNormalization { Verbatim, Normalized };

enum class BinStrategy { Uniform, Quantile };

struct ScatterParams {
    std::array<double, 3> alpha{0.1, 0.1, 0.1}; // scattering-density proxy, 1/m, >= 0
    std::array<double, 3> gamma{1.0, 1.0, 1.0}; // kernel width growth, sigma pixels per meter, > 0
    double kernel_cutoff = 3.0;                 // truncation half-width in sigmas, >= 1
    KernelNormalization normalization = KernelNormalization::Verbatim;
    double delta_sigma_eps = 0.25;              // below this sigma a source deposits at its own pixel
};

void validate(const ScatterParams& params);

/// Depth-dependent per-source weight k_c(x) = exp(-alpha_c * z(x)), in [0,1)
/// for positive depth. This is the factor applied to each source inside the
/// scattered-radiance integral.
struct ScatterField {
    ImagePlane map;
};

ScatterField scatter_likelihood(const DepthMap& depth, const ScatterParams& params);

/// Diffusion kernel value for a photon leaving source pixel (xs, ys) at depth
/// z_src and arriving at (x, y): pref * exp(-((x-xs)^2+(y-ys)^2) / (2 sigma^2))
/// with sigma = gamma_c * z_src. Throws if sigma <= 0.
double gauss_kernel_value(double x, double y, double xs, double ys,
                          double z_src, double gamma_c, KernelNormalization mode);

/// Reference evaluation of the scattered-radiance sum: every pixel acts as a
/// source whose weighted radiance k_c*J_c spreads over a window of half-width
/// ceil(kernel_cutoff * sigma) around it (square window, matching the
/// separable fast path); spread falling outside the frame is lost. Sources
/// with sigma below delta_sigma_eps deposit at their own pixel. O(N * w^2)
/// per channel, deterministic accumulation order.
ImagePlane scattered_radiance_exact(const ImagePlane& clean, const DepthMap& depth,
                                    const ScatterField& k, const ScatterParams& params);

/// Depth-binned approximation: sources are quantized onto `bins` depth
/// centers (for Uniform, centers span [z_min, z_max] endpoints inclusive;
/// one bin uses the midpoint) and each bin's masked weighted image is run
/// through a separable convolution at that center's sigma. Matches the exact
/// path to float accumulation error whenever every depth equals its bin
/// center. threads = 0 uses all hardware threads; results do not depend on
/// the thread count.
ImagePlane scattered_radiance_fast(const ImagePlane& clean, const DepthMap& depth,
                                   const ScatterField& k, const ScatterParams& params,
                                   int bins, BinStrategy strategy = BinStrategy::Uniform,
                                   int threads = 1);

/// Full composition: I_c = (J_sct_c + (1-k_c) J_c) t_c + (1-t_c) A_c.
/// Unclamped; clamping belongs to export.
ImagePlane compose_scattered(const ImagePlane& clean, const ImagePlane& j_sct,
                             const ScatterField& k, const TransmissionMap& t,
                             const WaterProfile& profile);

} // namespace uwsim
