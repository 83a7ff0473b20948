#ifndef PRNU_CORRELATION_HPP
#define PRNU_CORRELATION_HPP

#include "prnu/types.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace prnu {

inline constexpr int kPceExclusionWindow = 11;

/// Result of a peak-to-correlation-energy comparison.
struct PceReport {
    Index peak_row = 0; // cyclic displacement of the peak
    Index peak_col = 0;
    double peak_value = 0;
    double pce = 0;
    Index excluded_window = 0; // number of distinct surface bins left out of the energy
};

namespace detail {

template <typename Scalar>
void fft2_inplace(Image<std::complex<Scalar>>& data, bool inverse)
{
    Eigen::FFT<Scalar> fft;
    const Index rows = data.rows();
    const Index cols = data.cols();
    std::vector<std::complex<Scalar>> in(std::max(rows, cols)), out(std::max(rows, cols));
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) in[c] = data(r, c);
        inverse ? fft.inv(out.data(), in.data(), cols) : fft.fwd(out.data(), in.data(), cols);
        for (Index c = 0; c < cols; ++c) data(r, c) = out[c];
    }
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) in[r] = data(r, c);
        inverse ? fft.inv(out.data(), in.data(), rows) : fft.fwd(out.data(), in.data(), rows);
        for (Index r = 0; r < rows; ++r) data(r, c) = out[r];
    }
}

template <typename Derived>
Image<typename Derived::Scalar> centered(const Eigen::MatrixBase<Derived>& m, const char* what)
{
    using Scalar = typename Derived::Scalar;
    Image<Scalar> out = m.array() - m.mean();
    const Scalar energy = out.squaredNorm();
    if (!(energy > 0) || !std::isfinite(energy)) {
        throw std::invalid_argument(std::string(what) + ": zero-variance or non-finite input");
    }
    return out;
}

} // namespace detail

/// Circular cross-correlation of the mean-subtracted inputs over every cyclic
/// displacement: C(s) = sum_x a'(x) b'(x + s). Evaluated in the frequency domain.
template <typename DerivedA, typename DerivedB>
Image<typename DerivedA::Scalar> xcorr_circular(const Eigen::MatrixBase<DerivedA>& a,
                                                const Eigen::MatrixBase<DerivedB>& b)
{
    using Scalar = typename DerivedA::Scalar;
    using Complex = std::complex<Scalar>;
    if (!same_shape(a, b)) {
        throw std::invalid_argument("xcorr_circular: dimension mismatch " + shape_string(a.rows(), a.cols()) +
                                    " vs " + shape_string(b.rows(), b.cols()));
    }
    Image<Complex> fa = detail::centered(a, "xcorr_circular").template cast<Complex>();
    Image<Complex> fb = detail::centered(b, "xcorr_circular").template cast<Complex>();
    detail::fft2_inplace(fa, false);
    detail::fft2_inplace(fb, false);
    fa = fa.conjugate().cwiseProduct(fb);
    detail::fft2_inplace(fa, true);
    return fa.real();
}

/// PCE of a correlation surface: squared signed maximum over the mean squared
/// value outside a window x window neighbourhood of the peak (cyclically wrapped).
/// Ties in the maximum go to the smallest (row, col).
PceReport pce_of_surface(const Frame& surface, int window = kPceExclusionWindow);

/// PCE of two equally sized matrices.
PceReport pce(const Frame& a, const Frame& b, int window = kPceExclusionWindow);

/// Zero-shift Pearson correlation coefficient.
double pearson(const Frame& a, const Frame& b);

} // namespace prnu

#endif // PRNU_CORRELATION_HPP
