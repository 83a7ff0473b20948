#ifndef PRNU_WAVELET_HPP
#define PRNU_WAVELET_HPP

#include "prnu/types.hpp"

#include <string>
#include <vector>

namespace prnu {

/// Orthonormal two-channel filter bank described by its lowpass analysis taps.
/// The highpass taps follow the quadrature-mirror rule g[n] = (-1)^n h[L-1-n].
class Wavelet {
public:
    explicit Wavelet(std::vector<double> lowpass, std::string name = "custom")
        : lowpass_(std::move(lowpass)), highpass_(lowpass_.size()), name_(std::move(name))
    {
        if (lowpass_.size() < 2 || lowpass_.size() % 2 != 0) {
            throw std::invalid_argument("wavelet filter length must be even and >= 2");
        }
        const std::size_t len = lowpass_.size();
        for (std::size_t n = 0; n < len; ++n) {
            highpass_[n] = (n % 2 == 0 ? 1.0 : -1.0) * lowpass_[len - 1 - n];
        }
    }

    /// 8-tap Daubechies filter (four vanishing moments).
    static Wavelet daubechies8()
    {
        return Wavelet({0.23037781330885523, 0.7148465705525415, 0.6308807679295904, -0.02798376941698385,
                        -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278},
                       "db8tap");
    }

    static Wavelet haar()
    {
        const double s = 0.70710678118654752440;
        return Wavelet({s, s}, "haar");
    }

    const std::vector<double>& lowpass() const { return lowpass_; }
    const std::vector<double>& highpass() const { return highpass_; }
    const std::string& name() const { return name_; }
    std::size_t taps() const { return lowpass_.size(); }

private:
    std::vector<double> lowpass_;
    std::vector<double> highpass_;
    std::string name_;
};

template <typename Scalar>
struct WaveletPyramid {
    struct Level {
        Image<Scalar> horizontal; // highpass along y, lowpass along x
        Image<Scalar> vertical;   // lowpass along y, highpass along x
        Image<Scalar> diagonal;   // highpass along both axes
    };

    std::vector<Level> details; // details[0] is the finest level
    Image<Scalar> approximation;
    Index rows = 0; // dimensions before padding
    Index cols = 0;

    int levels() const { return static_cast<int>(details.size()); }
    Index padded_rows() const { return approximation.rows() << details.size(); }
    Index padded_cols() const { return approximation.cols() << details.size(); }
};

/// Maps any integer index into [0, n) by half-sample symmetric reflection,
/// repeating the reflection as often as needed.
inline Index reflect_index(Index i, Index n)
{
    const Index period = 2 * n;
    Index m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

/// Pads at the bottom and right by symmetric replication so both sides become
/// multiples of `multiple`.
template <typename Derived>
Image<typename Derived::Scalar> pad_symmetric(const Eigen::MatrixBase<Derived>& in, Index multiple)
{
    const Index rows = (in.rows() + multiple - 1) / multiple * multiple;
    const Index cols = (in.cols() + multiple - 1) / multiple * multiple;
    Image<typename Derived::Scalar> out(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Index sr = reflect_index(r, in.rows());
        for (Index c = 0; c < cols; ++c) {
            out(r, c) = in(sr, reflect_index(c, in.cols()));
        }
    }
    return out;
}

namespace detail {

// One periodic analysis step on a strided 1-D signal of even length n:
//   low[k]  = sum_t h[t] x[(2k+t) mod n],  high[k] = sum_t g[t] x[(2k+t) mod n]
template <typename Scalar>
void analyze_1d(const Scalar* x, Index stride, Index n, const Wavelet& w, Scalar* low, Scalar* high)
{
    const auto& h = w.lowpass();
    const auto& g = w.highpass();
    const Index taps = static_cast<Index>(h.size());
    for (Index k = 0; k < n / 2; ++k) {
        Scalar lo = 0, hi = 0;
        Index idx = 2 * k;
        for (Index t = 0; t < taps; ++t, ++idx) {
            if (idx >= n) idx -= n;
            if (idx >= n) idx %= n;
            const Scalar v = x[idx * stride];
            lo += static_cast<Scalar>(h[t]) * v;
            hi += static_cast<Scalar>(g[t]) * v;
        }
        low[k] = lo;
        high[k] = hi;
    }
}

// Transpose of analyze_1d; reconstructs the n-sample signal from n/2 + n/2 coefficients.
template <typename Scalar>
void synthesize_1d(const Scalar* low, const Scalar* high, Index n, const Wavelet& w, Scalar* x, Index stride)
{
    const auto& h = w.lowpass();
    const auto& g = w.highpass();
    const Index taps = static_cast<Index>(h.size());
    for (Index i = 0; i < n; ++i) x[i * stride] = 0;
    for (Index k = 0; k < n / 2; ++k) {
        const Scalar lo = low[k];
        const Scalar hi = high[k];
        Index idx = 2 * k;
        for (Index t = 0; t < taps; ++t, ++idx) {
            if (idx >= n) idx -= n;
            if (idx >= n) idx %= n;
            x[idx * stride] += static_cast<Scalar>(h[t]) * lo + static_cast<Scalar>(g[t]) * hi;
        }
    }
}

// Single 2-D level: rows first, then columns. Output quadrants of `work` are
// [LL HL; LH HH] in (row-band, column-band) order.
template <typename Scalar>
void analyze_level(Image<Scalar>& work, Index rows, Index cols, const Wavelet& w)
{
    std::vector<Scalar> in(std::max(rows, cols)), lo(std::max(rows, cols) / 2), hi(std::max(rows, cols) / 2);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) in[c] = work(r, c);
        analyze_1d(in.data(), 1, cols, w, lo.data(), hi.data());
        for (Index c = 0; c < cols / 2; ++c) {
            work(r, c) = lo[c];
            work(r, cols / 2 + c) = hi[c];
        }
    }
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) in[r] = work(r, c);
        analyze_1d(in.data(), 1, rows, w, lo.data(), hi.data());
        for (Index r = 0; r < rows / 2; ++r) {
            work(r, c) = lo[r];
            work(rows / 2 + r, c) = hi[r];
        }
    }
}

template <typename Scalar>
void synthesize_level(Image<Scalar>& work, Index rows, Index cols, const Wavelet& w)
{
    std::vector<Scalar> out(std::max(rows, cols)), lo(std::max(rows, cols) / 2), hi(std::max(rows, cols) / 2);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows / 2; ++r) {
            lo[r] = work(r, c);
            hi[r] = work(rows / 2 + r, c);
        }
        synthesize_1d(lo.data(), hi.data(), rows, w, out.data(), 1);
        for (Index r = 0; r < rows; ++r) work(r, c) = out[r];
    }
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols / 2; ++c) {
            lo[c] = work(r, c);
            hi[c] = work(r, cols / 2 + c);
        }
        synthesize_1d(lo.data(), hi.data(), cols, w, out.data(), 1);
        for (Index c = 0; c < cols; ++c) work(r, c) = out[c];
    }
}

} // namespace detail

/// Multi-level separable orthogonal 2-D DWT with periodic boundary handling on
/// the symmetrically padded input. Energy is preserved with respect to the
/// padded image.
template <typename Derived>
WaveletPyramid<typename Derived::Scalar> dwt2(const Eigen::MatrixBase<Derived>& image, int levels,
                                               const Wavelet& wavelet = Wavelet::daubechies8())
{
    using Scalar = typename Derived::Scalar;
    if (levels < 1) {
        throw std::invalid_argument("dwt2 needs at least one level");
    }
    const Index block = Index{1} << levels;
    if (image.rows() < block || image.cols() < block) {
        throw std::invalid_argument("frame too small for " + std::to_string(levels) + " wavelet levels: " +
                                    shape_string(image.rows(), image.cols()));
    }
    WaveletPyramid<Scalar> pyramid;
    pyramid.rows = image.rows();
    pyramid.cols = image.cols();
    Image<Scalar> work = pad_symmetric(image, block);
    Index rows = work.rows();
    Index cols = work.cols();
    for (int level = 0; level < levels; ++level) {
        detail::analyze_level(work, rows, cols, wavelet);
        const Index hr = rows / 2, hc = cols / 2;
        pyramid.details.push_back({work.block(hr, 0, hr, hc), work.block(0, hc, hr, hc), work.block(hr, hc, hr, hc)});
        rows = hr;
        cols = hc;
    }
    pyramid.approximation = work.topLeftCorner(rows, cols);
    return pyramid;
}

/// Inverse of dwt2; the reconstruction is cropped back to the original size.
template <typename Scalar>
Image<Scalar> idwt2(const WaveletPyramid<Scalar>& pyramid, const Wavelet& wavelet = Wavelet::daubechies8())
{
    const int levels = pyramid.levels();
    if (levels < 1) {
        throw std::invalid_argument("idwt2: pyramid has no detail levels");
    }
    const Index padded_rows = pyramid.padded_rows();
    const Index padded_cols = pyramid.padded_cols();
    if (pyramid.approximation.size() == 0 || pyramid.rows <= 0 || pyramid.cols <= 0 ||
        pyramid.rows > padded_rows || pyramid.cols > padded_cols) {
        throw std::invalid_argument("idwt2: inconsistent subband dimensions");
    }
    for (int k = 0; k < levels; ++k) {
        const Index r = padded_rows >> (k + 1);
        const Index c = padded_cols >> (k + 1);
        const auto& lvl = pyramid.details[k];
        for (const auto* band : {&lvl.horizontal, &lvl.vertical, &lvl.diagonal}) {
            if (band->rows() != r || band->cols() != c) {
                throw std::invalid_argument("idwt2: inconsistent subband dimensions at level " + std::to_string(k + 1));
            }
        }
    }
    Image<Scalar> work(padded_rows, padded_cols);
    Index rows = pyramid.approximation.rows();
    Index cols = pyramid.approximation.cols();
    work.topLeftCorner(rows, cols) = pyramid.approximation;
    for (int k = levels - 1; k >= 0; --k) {
        const auto& lvl = pyramid.details[k];
        work.block(rows, 0, rows, cols) = lvl.horizontal;
        work.block(0, cols, rows, cols) = lvl.vertical;
        work.block(rows, cols, rows, cols) = lvl.diagonal;
        rows *= 2;
        cols *= 2;
        detail::synthesize_level(work, rows, cols, wavelet);
    }
    return work.topLeftCorner(pyramid.rows, pyramid.cols);
}

} // namespace prnu

#endif // PRNU_WAVELET_HPP
