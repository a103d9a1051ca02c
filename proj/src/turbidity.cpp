#include "uwsim/turbidity.hpp"

#include <stdexcept>

#include "uwsim/gaussian.hpp"

namespace uwsim {

void validate(const TurbidityParams& params) {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(params.u)) throw std::invalid_argument("turbidity params: u must be in [0,1]");
    for (int c = 0; c < 3; ++c) {
        if (!in01(params.sp_col[c])) throw std::invalid_argument("turbidity params: sp_col must be in [0,1]");
        if (!in01(params.pr[c])) throw std::invalid_argument("turbidity params: pr must be in [0,1]");
        if (params.sigma[c] < 0.0) throw std::invalid_argument("turbidity params: sigma must be >= 0");
    }
}

ImagePlane make_particle_layer(int height, int width, const TurbidityParams& params,
                               const RngStream& rng) {
    validate(params);
    ImagePlane sp(height, width);
    const std::size_t n = sp.pixel_count();
    for (int c = 0; c < 3; ++c) {
        const std::uint64_t substream = rng.stream_id() * 3 + static_cast<std::uint64_t>(c);
        const float particle = params.bipolar ? 0.0f : static_cast<float>(params.sp_col[c]);
        const float background = params.bipolar ? static_cast<float>(params.sp_col[c]) : 0.0f;
        auto plane = sp.channel(c);
        for (std::size_t i = 0; i < n; ++i) {
            const double draw = RngStream::uniform_at(rng.seed(), substream, i);
            plane[i] = draw < params.pr[c] ? particle : background;
        }
        if (params.sigma[c] > 0.0) {
            gaussian_blur_channel(plane, plane, height, width, params.sigma[c],
                                  3.0, EdgePolicy::Renormalize);
        }
    }
    return sp;
}

ImagePlane blend_turbidity(const ImagePlane& i_sct, const ImagePlane& sp, double u) {
    if (u < 0.0 || u > 1.0) throw std::invalid_argument("blend_turbidity: u must be in [0,1]");
    if (!i_sct.same_shape(sp)) throw std::invalid_argument("blend_turbidity: dimension mismatch");
    ImagePlane out(i_sct.height(), i_sct.width());
    const float uf = static_cast<float>(u);
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        out.data()[i] = uf * i_sct.data()[i] + (1.0f - uf) * sp.data()[i];
    }
    return out;
}

} // namespace uwsim
