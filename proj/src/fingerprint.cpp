#include "prnu/fingerprint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace prnu {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'R', 'N', 'U', 'F', 'P', '0', '1'};

void put_u32(std::ostream& out, std::uint32_t v)
{
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in)
{
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw InputError("fingerprint file truncated");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint32_t checked_u32(std::uint64_t v, const char* what)
{
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument(std::string("fingerprint ") + what + " exceeds 32 bits");
    }
    return static_cast<std::uint32_t>(v);
}

} // namespace

FingerprintAccumulator::FingerprintAccumulator(Index rows, Index cols)
    : numerator_(Frame::Zero(rows, cols)), denominator_(Frame::Zero(rows, cols))
{
}

void FingerprintAccumulator::add(const Frame& frame, const DenoiseParams& params)
{
    if (!same_shape(frame, numerator_)) {
        throw std::invalid_argument("accumulate: frame " + shape_string(frame.rows(), frame.cols()) +
                                    " does not match accumulator " + shape_string(rows(), cols()));
    }
    add(split_noise(frame, params));
}

void FingerprintAccumulator::add(const NoiseSplit& split)
{
    if (!same_shape(split.residual, numerator_) || !same_shape(split.content, numerator_)) {
        throw std::invalid_argument("accumulate: residual shape does not match accumulator " +
                                    shape_string(rows(), cols()));
    }
    numerator_.array() += split.residual.array() * split.content.array();
    denominator_.array() += split.content.array().square();
    ++frame_count_;
}

void FingerprintAccumulator::merge(const FingerprintAccumulator& other)
{
    if (!same_shape(other.numerator_, numerator_)) {
        throw std::invalid_argument("merge: accumulator shapes differ: " + shape_string(rows(), cols()) + " vs " +
                                    shape_string(other.rows(), other.cols()));
    }
    numerator_ += other.numerator_;
    denominator_ += other.denominator_;
    frame_count_ += other.frame_count_;
}

FingerprintAccumulator accumulate(FingerprintAccumulator acc, const Frame& frame, const DenoiseParams& params)
{
    acc.add(frame, params);
    return acc;
}

FingerprintAccumulator merge(FingerprintAccumulator a, const FingerprintAccumulator& b)
{
    a.merge(b);
    return a;
}

Fingerprint finalize(const FingerprintAccumulator& acc, std::string camera_id)
{
    if (acc.frame_count() == 0) {
        throw std::invalid_argument("finalize: empty accumulator");
    }
    Fingerprint fp;
    fp.camera_id = std::move(camera_id);
    fp.frame_count = checked_u32(acc.frame_count(), "frame count");
    fp.pattern = (acc.denominator().array() < kDenominatorFloor)
                     .select(0.0, acc.numerator().array() / acc.denominator().array())
                     .matrix();
    return fp;
}

void write_fingerprint(std::ostream& out, const Fingerprint& fp)
{
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, checked_u32(static_cast<std::uint64_t>(fp.rows()), "rows"));
    put_u32(out, checked_u32(static_cast<std::uint64_t>(fp.cols()), "cols"));
    put_u32(out, fp.frame_count);
    put_u32(out, checked_u32(fp.camera_id.size(), "camera id"));
    out.write(fp.camera_id.data(), static_cast<std::streamsize>(fp.camera_id.size()));
    std::vector<unsigned char> bytes(static_cast<std::size_t>(fp.pattern.size()) * 4);
    std::size_t k = 0;
    for (Index r = 0; r < fp.rows(); ++r) {
        for (Index c = 0; c < fp.cols(); ++c) {
            const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(fp.pattern(r, c)));
            for (int shift = 0; shift < 32; shift += 8) bytes[k++] = static_cast<unsigned char>(bits >> shift);
        }
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw InputError("failed writing fingerprint for camera " + fp.camera_id);
    }
}

void write_fingerprint(const std::filesystem::path& path, const Fingerprint& fp)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot open " + path.string() + " for writing");
    }
    write_fingerprint(out, fp);
}

Fingerprint read_fingerprint(std::istream& in)
{
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw InputError("not a fingerprint file (bad magic)");
    }
    const std::uint32_t rows = get_u32(in);
    const std::uint32_t cols = get_u32(in);
    Fingerprint fp;
    fp.frame_count = get_u32(in);
    const std::uint32_t id_len = get_u32(in);
    if (rows == 0 || cols == 0 || static_cast<std::uint64_t>(rows) * cols > (std::uint64_t{1} << 31) ||
        id_len > (1u << 16)) {
        throw InputError("fingerprint header is implausible");
    }
    fp.camera_id.resize(id_len);
    if (!in.read(fp.camera_id.data(), id_len)) {
        throw InputError("fingerprint file truncated");
    }
    std::vector<unsigned char> bytes(static_cast<std::size_t>(rows) * cols * 4);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()))) {
        throw InputError("fingerprint file truncated");
    }
    fp.pattern.resize(rows, cols);
    std::size_t k = 0;
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c, k += 4) {
            const std::uint32_t bits = static_cast<std::uint32_t>(bytes[k]) |
                                       (static_cast<std::uint32_t>(bytes[k + 1]) << 8) |
                                       (static_cast<std::uint32_t>(bytes[k + 2]) << 16) |
                                       (static_cast<std::uint32_t>(bytes[k + 3]) << 24);
            fp.pattern(r, c) = std::bit_cast<float>(bits);
        }
    }
    if (!fp.pattern.allFinite()) {
        throw InputError("fingerprint contains non-finite values");
    }
    return fp;
}

Fingerprint read_fingerprint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open fingerprint file " + path.string());
    }
    try {
        return read_fingerprint(in);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

} // namespace prnu
