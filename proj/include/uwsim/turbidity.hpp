#pragma once

#include <array>

#include "uwsim/image.hpp"
#include "uwsim/rng.hpp"

namespace uwsim {

struct TurbidityParams {
    double u = 1.0;                          // blend weight, 1 = no particle layer
    std::array<double, 3> sp_col{1.0, 1.0, 1.0};
    std::array<double, 3> pr{0.0, 0.0, 0.0}; // per-channel particle probability
    std::array<double, 3> sigma{0.0, 0.0, 0.0}; // per-channel blur deviation, px
    bool bipolar = false; // see make_particle_layer
};

void validate(const TurbidityParams& params);

/// Random particle layer, blurred per channel with a 3-sigma truncated
/// Gaussian whose edge taps are renormalized. Default polarity places
/// sp_col-colored particles on black; bipolar instead starts from an
/// sp_col background and punches black particles into it.
///
/// Channel c draws pixel i from the derived stream
/// (seed, stream_id * 3 + c) at counter i, one draw per pixel, so channels
/// and images can be generated concurrently and still replay bit-exactly.
ImagePlane make_particle_layer(int height, int width, const TurbidityParams& params,
                               const RngStream& rng);

/// Convex blend u * i_sct + (1 - u) * sp.
ImagePlane blend_turbidity(const ImagePlane& i_sct, const ImagePlane& sp, double u);

} // namespace uwsim
