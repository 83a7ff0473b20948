#ifndef PRNU_IMAGING_HPP
#define PRNU_IMAGING_HPP

#include "prnu/types.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

namespace prnu {

/// Three-channel image on the 0-255 scale. Channels are held as separate planes;
/// files are read from and written to their interleaved layout.
struct RgbFrame {
    std::array<Frame, 3> channels; // R, G, B

    Index rows() const { return channels[0].rows(); }
    Index cols() const { return channels[0].cols(); }
    const Frame& red() const { return channels[0]; }
    const Frame& green() const { return channels[1]; }
    const Frame& blue() const { return channels[2]; }

    static RgbFrame from_gray(const Frame& gray) { return RgbFrame{{gray, gray, gray}}; }
};

/// Reads an 8-bit PNG or binary PGM/PPM. Grayscale files are replicated across
/// the three channels; values are widened to double without scaling.
/// Throws InputError on unreadable, corrupt, or unsupported files.
RgbFrame load_frame(const std::filesystem::path& path);

/// Writes an 8-bit PNG (grayscale when all channels match, RGB otherwise).
/// Pixel values are rounded and clamped to [0, 255].
void save_png(const std::filesystem::path& path, const RgbFrame& image);
void save_png(const std::filesystem::path& path, const Frame& gray);

/// Writes binary PGM (P5) or PPM (P6).
void save_pnm(const std::filesystem::path& path, const Frame& gray);
void save_pnm(const std::filesystem::path& path, const RgbFrame& image);

/// ITU-R BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
Frame to_luminance(const RgbFrame& image);

/// Nearest-neighbour downscale: out(i,j) = f(floor(i*rows/out_rows), floor(j*cols/out_cols)).
/// Throws std::invalid_argument when asked to upscale.
Frame rescale_nearest(const Frame& frame, Index out_rows, Index out_cols);

/// Sorted list of frame files (png, pgm, ppm) in a directory.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// A directory of pre-extracted video frames, loaded lazily as luminance.
/// When a target resolution is set, larger frames are nearest-neighbour
/// downscaled to it on load and smaller frames raise CompatibilityError.
class FrameSequence {
public:
    explicit FrameSequence(std::filesystem::path dir, std::optional<std::array<Index, 2>> target = std::nullopt);

    std::size_t size() const { return files_.size(); }
    const std::filesystem::path& dir() const { return dir_; }
    const std::filesystem::path& file(std::size_t i) const { return files_.at(i); }

    Frame load(std::size_t i) const;

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
    std::optional<std::array<Index, 2>> target_;
};

/// Loads a frame file as luminance and harmonises it to the target resolution.
Frame load_luminance(const std::filesystem::path& path, std::optional<std::array<Index, 2>> target = std::nullopt);

/// Applies the downscale-only resolution rule used for mixed-resolution inputs.
Frame harmonize_resolution(const Frame& frame, Index rows, Index cols);

} // namespace prnu

#endif // PRNU_IMAGING_HPP
