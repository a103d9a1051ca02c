#pragma once

#include "uwsim/image.hpp"
#include "uwsim/water.hpp"

namespace uwsim {

/// Per-channel straight-path transmission t_c(x) = exp(-beta_c * z(x)),
/// in (0,1] for clipped depth.
struct TransmissionMap {
    ImagePlane map;
};

TransmissionMap transmission_map(const DepthMap& depth, const WaterProfile& profile);

/// Two-term haze composition: attenuated signal plus veiling light,
/// I_c = t_c * J_c + (1 - t_c) * A_c. A per-pixel convex combination, so the
/// output stays inside [min(J,A), max(J,A)] channel-wise.
ImagePlane degrade_classic(const ImagePlane& clean, const TransmissionMap& t,
                           const WaterProfile& profile);

} // namespace uwsim
