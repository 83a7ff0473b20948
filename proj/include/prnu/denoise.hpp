#ifndef PRNU_DENOISE_HPP
#define PRNU_DENOISE_HPP

#include "prnu/types.hpp"
#include "prnu/wavelet.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <span>

namespace prnu {

inline constexpr std::array<int, 4> kDefaultVarianceWindows = {3, 5, 7, 9};

struct DenoiseParams {
    double sigma0 = 5.0; // noise std on the 0-255 scale
    int levels = 4;
    Wavelet wavelet = Wavelet::daubechies8();
};

/// Mean of `band` over a w x w window centred on every coefficient, with
/// symmetric edge replication.
template <typename Derived>
Image<typename Derived::Scalar> box_mean_symmetric(const Eigen::MatrixBase<Derived>& band, int window)
{
    using Scalar = typename Derived::Scalar;
    const Index rows = band.rows();
    const Index cols = band.cols();
    const Index r = window / 2;
    // Horizontal pass over a column-extended copy, then vertical pass.
    Image<Scalar> horizontal(rows + 2 * r, cols);
    for (Index i = 0; i < rows + 2 * r; ++i) {
        const Index si = reflect_index(i - r, rows);
        Scalar sum = 0;
        for (Index dj = -r; dj <= r; ++dj) sum += band(si, reflect_index(dj, cols));
        horizontal(i, 0) = sum;
        for (Index j = 1; j < cols; ++j) {
            sum += band(si, reflect_index(j + r, cols)) - band(si, reflect_index(j - r - 1, cols));
            horizontal(i, j) = sum;
        }
    }
    Image<Scalar> out(rows, cols);
    const Scalar scale = Scalar(1) / static_cast<Scalar>(window * window);
    for (Index j = 0; j < cols; ++j) {
        Scalar sum = 0;
        for (Index i = 0; i < window; ++i) sum += horizontal(i, j);
        out(0, j) = sum * scale;
        for (Index i = 1; i < rows; ++i) {
            sum += horizontal(i + 2 * r, j) - horizontal(i - 1, j);
            out(i, j) = sum * scale;
        }
    }
    return out;
}

/// Wiener-type shrinkage of one detail subband under white noise of std sigma0.
/// The local signal variance is the smallest of the windowed estimates
/// max(0, mean(c^2) - sigma0^2) over the given window sizes.
template <typename Derived>
Image<typename Derived::Scalar> wiener_shrink(const Eigen::MatrixBase<Derived>& band, typename Derived::Scalar sigma0,
                                              std::span<const int> windows = kDefaultVarianceWindows)
{
    using Scalar = typename Derived::Scalar;
    if (!(sigma0 > 0)) {
        throw std::invalid_argument("wiener_shrink: sigma0 must be positive");
    }
    if (windows.empty()) {
        throw std::invalid_argument("wiener_shrink: no variance windows given");
    }
    const Scalar noise_var = sigma0 * sigma0;
    const Image<Scalar> squared = band.cwiseAbs2();
    Image<Scalar> variance = Image<Scalar>::Constant(band.rows(), band.cols(), std::numeric_limits<Scalar>::infinity());
    for (int w : windows) {
        if (w < 1 || w % 2 == 0) {
            throw std::invalid_argument("wiener_shrink: window sizes must be odd and positive");
        }
        variance = variance.cwiseMin(box_mean_symmetric(squared, w));
    }
    variance = (variance.array() - noise_var).cwiseMax(Scalar(0)).matrix();
    return (band.array() * variance.array() / (variance.array() + noise_var)).matrix();
}

/// Noise residual W = f - denoise(f) and the denoised frame f - W.
struct NoiseSplit {
    Frame residual;
    Frame content;
};

/// Denoises every detail band of a multi-level DWT, leaving the approximation
/// band untouched, and splits the frame into residual and content.
NoiseSplit split_noise(const Frame& frame, const DenoiseParams& params = {});

/// Residual W = f - denoise(f).
Frame extract_residual(const Frame& frame, const DenoiseParams& params = {});

} // namespace prnu

#endif // PRNU_DENOISE_HPP
