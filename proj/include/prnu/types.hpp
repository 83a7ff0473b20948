#ifndef PRNU_TYPES_HPP
#define PRNU_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace prnu {

using Eigen::Index;

/// Dense single-channel image, row-major so that rows are contiguous the way
/// image files store them.
template <typename Scalar>
using Image = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Luminance frame on the 0-255 pixel scale.
using Frame = Image<double>;

/// Smallest frame side accepted by the pipeline (a 4-level decomposition needs 16).
inline constexpr Index kMinFrameSide = 16;

/// Bad or missing input data: unreadable files, empty directories, malformed manifests.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that are individually fine but cannot be used together, e.g. a query
/// video smaller than the enrollment resolution.
class CompatibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument unless the frame satisfies the Frame invariants.
inline void check_frame(const Frame& frame, const char* what = "frame")
{
    if (frame.rows() < kMinFrameSide || frame.cols() < kMinFrameSide) {
        throw std::invalid_argument(std::string(what) + " must be at least 16x16, got " +
                                    std::to_string(frame.rows()) + "x" + std::to_string(frame.cols()));
    }
    if (!frame.allFinite()) {
        throw std::invalid_argument(std::string(what) + " contains non-finite pixels");
    }
}

inline bool same_shape(const auto& a, const auto& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols();
}

inline std::string shape_string(Index rows, Index cols)
{
    return std::to_string(rows) + "x" + std::to_string(cols);
}

} // namespace prnu

#endif // PRNU_TYPES_HPP
