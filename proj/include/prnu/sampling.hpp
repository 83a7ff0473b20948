#ifndef PRNU_SAMPLING_HPP
#define PRNU_SAMPLING_HPP

#include "prnu/types.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace prnu {

enum class SamplingMode {
    select,  // one frame out of every N, starting at frame 0
    average, // mean of each consecutive block of N frames
};

std::string_view to_string(SamplingMode mode);

/// Frame index groups for a rate of 1/N. Select mode yields singletons
/// {0, N, 2N, ...}; average mode yields disjoint consecutive blocks of exactly
/// N frames with any trailing partial block dropped.
struct SamplingPlan {
    SamplingMode mode = SamplingMode::select;
    std::size_t n = 1;
    std::vector<std::vector<std::size_t>> groups;
};

SamplingPlan plan_sampling(std::size_t frame_count, std::size_t n, SamplingMode mode);

/// Element-wise arithmetic mean of equally sized frames.
Frame average_block(std::span<const Frame> frames);

} // namespace prnu

#endif // PRNU_SAMPLING_HPP
