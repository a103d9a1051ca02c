#include "uwsim/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace uwsim {

TransmissionMap transmission_map(const DepthMap& depth, const WaterProfile& profile) {
    validate(profile);
    if (depth.empty()) throw std::invalid_argument("transmission_map: empty depth map");
    TransmissionMap t{ImagePlane(depth.height(), depth.width())};
    for (int c = 0; c < 3; ++c) {
        auto out = t.map.channel(c);
        const double beta = profile.beta[c];
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<float>(std::exp(-beta * depth.data()[i]));
        }
    }
    return t;
}

ImagePlane degrade_classic(const ImagePlane& clean, const TransmissionMap& t,
                           const WaterProfile& profile) {
    validate(profile);
    if (!clean.same_shape(t.map)) {
        throw std::invalid_argument("degrade_classic: image/transmission dimension mismatch");
    }
    ImagePlane out(clean.height(), clean.width());
    for (int c = 0; c < 3; ++c) {
        const auto j = clean.channel(c);
        const auto tc = t.map.channel(c);
        auto o = out.channel(c);
        const float a = static_cast<float>(profile.veiling[c]);
        for (std::size_t i = 0; i < o.size(); ++i) {
            o[i] = tc[i] * j[i] + (1.0f - tc[i]) * a;
        }
    }
    return out;
}

} // namespace uwsim
