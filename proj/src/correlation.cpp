#include "prnu/correlation.hpp"

#include <algorithm>
#include <vector>

namespace prnu {

PceReport pce_of_surface(const Frame& surface, int window)
{
    if (window < 1 || window % 2 == 0) {
        throw std::invalid_argument("pce: exclusion window must be odd and positive");
    }
    const Index rows = surface.rows();
    const Index cols = surface.cols();
    const Index span_r = std::min<Index>(window, rows);
    const Index span_c = std::min<Index>(window, cols);
    if (rows * cols < static_cast<Index>(window) * window + 1 || rows * cols - span_r * span_c < 1) {
        throw std::invalid_argument("pce: surface " + shape_string(rows, cols) + " too small to exclude a " +
                                    std::to_string(window) + "x" + std::to_string(window) + " window");
    }

    PceReport report;
    report.peak_value = surface(0, 0);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            if (surface(r, c) > report.peak_value) {
                report.peak_value = surface(r, c);
                report.peak_row = r;
                report.peak_col = c;
            }
        }
    }

    // Rows/columns covered by the wrapped window around the peak.
    const Index half = window / 2;
    auto wrap = [](Index i, Index n) { return ((i % n) + n) % n; };
    std::vector<char> row_in(rows, 0), col_in(cols, 0);
    for (Index d = 0; d < span_r; ++d) row_in[wrap(report.peak_row - half + d, rows)] = 1;
    for (Index d = 0; d < span_c; ++d) col_in[wrap(report.peak_col - half + d, cols)] = 1;
    double energy = 0;
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            if (!(row_in[r] && col_in[c])) energy += surface(r, c) * surface(r, c);
        }
    }
    report.excluded_window = span_r * span_c;
    energy /= static_cast<double>(rows * cols - report.excluded_window);
    report.pce = report.peak_value * report.peak_value / energy;
    return report;
}

PceReport pce(const Frame& a, const Frame& b, int window)
{
    return pce_of_surface(xcorr_circular(a, b), window);
}

double pearson(const Frame& a, const Frame& b)
{
    if (!same_shape(a, b)) {
        throw std::invalid_argument("pearson: dimension mismatch " + shape_string(a.rows(), a.cols()) + " vs " +
                                    shape_string(b.rows(), b.cols()));
    }
    const Frame ca = detail::centered(a, "pearson");
    const Frame cb = detail::centered(b, "pearson");
    const double r = ca.cwiseProduct(cb).sum() / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
    return std::clamp(r, -1.0, 1.0);
}

} // namespace prnu
