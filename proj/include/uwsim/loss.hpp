#pragma once

#include <span>

#include "uwsim/image.hpp"

namespace uwsim {

// Pairwise losses for planes (depth-style or RGB). These are the building
// blocks of all total-loss forms below; they are pure and trainer-agnostic,
// weights arrive as plain scalars.

double l1_mean(const DepthMap& a, const DepthMap& b);
double l1_mean(const ImagePlane& a, const ImagePlane& b);

/// (1 - ssim(a, b)) / 2, in [0, 1].
double ssim_loss(const DepthMap& a, const DepthMap& b);
double ssim_loss(const ImagePlane& a, const ImagePlane& b);

/// lambda1 * l1_mean + lambda2 * ssim_loss, the fixed-weight pair loss.
double pair_loss_fixed(const DepthMap& a, const DepthMap& b, double lambda1, double lambda2);
double pair_loss_fixed(const ImagePlane& a, const ImagePlane& b, double lambda1, double lambda2);

/// w * l1_mean + (1 - w) * ssim_loss, the sigmoid-weighted pair loss.
double pair_loss_weighted(const DepthMap& a, const DepthMap& b, double w);
double pair_loss_weighted(const ImagePlane& a, const ImagePlane& b, double w);

/// Reciprocal depth: pointwise m / y. Applying it twice with the same m is
/// the identity.
DepthMap depth_transform(const DepthMap& y_orig, double m);

/// Pointwise sum of the model-based image and a learned residue; unclamped.
ImagePlane residual_compose(const ImagePlane& i_initial, const ImagePlane& residue);

// Totals: plain sums of the per-branch losses.
double total_technique1(double l_d, double l_p);
double total_technique2(double l_d, double l_p, double l_t);
double total_technique3(double l_d, double l_p, double l_t, double l_g);

/// Simplex-weighted total: sum_i w_i * comp_i + (1 - sum w) * comp_last,
/// with len(w) = len(components) - 1, w >= 0 and sum(w) <= 1.
double total_variant2(std::span<const double> components, std::span<const double> weights);

/// Mean of per-image weights over a batch; stays in [0,1].
double batch_mean_weight(std::span<const double> per_image_weights);

} // namespace uwsim
