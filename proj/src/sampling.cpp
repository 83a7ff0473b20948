#include "prnu/sampling.hpp"

namespace prnu {

std::string_view to_string(SamplingMode mode)
{
    return mode == SamplingMode::select ? "select" : "average";
}

SamplingPlan plan_sampling(std::size_t frame_count, std::size_t n, SamplingMode mode)
{
    if (n == 0) {
        throw std::invalid_argument("sampling rate denominator N must be >= 1");
    }
    if (frame_count == 0) {
        throw std::invalid_argument("cannot plan sampling over zero frames");
    }
    SamplingPlan plan{mode, n, {}};
    if (mode == SamplingMode::select) {
        for (std::size_t i = 0; i < frame_count; i += n) plan.groups.push_back({i});
    } else {
        for (std::size_t start = 0; start + n <= frame_count; start += n) {
            auto& group = plan.groups.emplace_back(n);
            for (std::size_t k = 0; k < n; ++k) group[k] = start + k;
        }
    }
    return plan;
}

Frame average_block(std::span<const Frame> frames)
{
    if (frames.empty()) {
        throw std::invalid_argument("average_block: empty frame list");
    }
    // Incremental mean: identical inputs reproduce themselves exactly.
    Frame mean = frames.front();
    double k = 1;
    for (const Frame& f : frames.subspan(1)) {
        if (!same_shape(f, mean)) {
            throw std::invalid_argument("average_block: dimension mismatch " + shape_string(f.rows(), f.cols()) +
                                        " vs " + shape_string(mean.rows(), mean.cols()));
        }
        k += 1;
        mean += (f - mean) / k;
    }
    return mean;
}

} // namespace prnu
