#include "prnu/denoise.hpp"

namespace prnu {

NoiseSplit split_noise(const Frame& frame, const DenoiseParams& params)
{
    check_frame(frame);
    auto pyramid = dwt2(frame, params.levels, params.wavelet);
    const double sigma0 = params.sigma0;
    for (auto& level : pyramid.details) {
        level.horizontal = wiener_shrink(level.horizontal, sigma0);
        level.vertical = wiener_shrink(level.vertical, sigma0);
        level.diagonal = wiener_shrink(level.diagonal, sigma0);
    }
    NoiseSplit split;
    split.residual = frame - idwt2(pyramid, params.wavelet);
    split.content = frame - split.residual;
    return split;
}

Frame extract_residual(const Frame& frame, const DenoiseParams& params)
{
    return split_noise(frame, params).residual;
}

} // namespace prnu
