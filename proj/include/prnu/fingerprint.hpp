#ifndef PRNU_FINGERPRINT_HPP
#define PRNU_FINGERPRINT_HPP

#include "prnu/denoise.hpp"
#include "prnu/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace prnu {

/// Where the weighted-average denominator falls below this, the fingerprint is 0.
inline constexpr double kDenominatorFloor = 1e-6;

/// Running sums of the weighted-average fingerprint estimator:
/// numerator = sum W*I, denominator = sum I^2, with I the denoised frame.
/// Partial accumulators over disjoint frame sets merge by element-wise addition.
class FingerprintAccumulator {
public:
    FingerprintAccumulator() = default;
    FingerprintAccumulator(Index rows, Index cols);

    Index rows() const { return numerator_.rows(); }
    Index cols() const { return numerator_.cols(); }
    std::uint64_t frame_count() const { return frame_count_; }
    const Frame& numerator() const { return numerator_; }
    const Frame& denominator() const { return denominator_; }

    /// Denoises the frame and adds its contribution.
    void add(const Frame& frame, const DenoiseParams& params = {});
    /// Adds an already computed residual/content pair.
    void add(const NoiseSplit& split);
    void merge(const FingerprintAccumulator& other);

private:
    Frame numerator_;
    Frame denominator_;
    std::uint64_t frame_count_ = 0;
};

struct Fingerprint {
    std::string camera_id;
    Frame pattern;
    std::uint32_t frame_count = 0;

    Index rows() const { return pattern.rows(); }
    Index cols() const { return pattern.cols(); }
};

FingerprintAccumulator accumulate(FingerprintAccumulator acc, const Frame& frame, const DenoiseParams& params = {});
FingerprintAccumulator merge(FingerprintAccumulator a, const FingerprintAccumulator& b);

/// F = numerator / denominator, 0 where the denominator is below kDenominatorFloor.
Fingerprint finalize(const FingerprintAccumulator& acc, std::string camera_id = {});

// File format, all little-endian:
//   "PRNUFP01" | u32 rows | u32 cols | u32 frame_count | u32 id_len | id bytes | rows*cols f32 row-major
void write_fingerprint(std::ostream& out, const Fingerprint& fp);
void write_fingerprint(const std::filesystem::path& path, const Fingerprint& fp);
Fingerprint read_fingerprint(std::istream& in);
Fingerprint read_fingerprint(const std::filesystem::path& path);

} // namespace prnu

#endif // PRNU_FINGERPRINT_HPP
