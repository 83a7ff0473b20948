#include "prnu/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

namespace prnu {
namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> read_bytes(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open image file: " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string lower_extension(const fs::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

RgbFrame from_interleaved(const unsigned char* data, Index rows, Index cols, int stride_channels, bool color)
{
    RgbFrame out{{Frame(rows, cols), Frame(rows, cols), Frame(rows, cols)}};
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            const unsigned char* px = data + (r * cols + c) * stride_channels;
            for (int ch = 0; ch < 3; ++ch) {
                out.channels[ch](r, c) = static_cast<double>(color ? px[ch] : px[0]);
            }
        }
    }
    return out;
}

RgbFrame decode_png(const std::vector<unsigned char>& bytes, const fs::path& path)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        std::string msg = image.message;
        png_image_free(&image);
        throw InputError("corrupt image: " + path.string() + " (" + msg + ")");
    }
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw InputError("unsupported format: 16-bit PNG " + path.string());
    }
    const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
    const bool alpha = image.format & PNG_FORMAT_FLAG_ALPHA;
    // Keep alpha when present so libpng does not composite it into the colour values.
    image.format = (color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY) | (alpha ? PNG_FORMAT_FLAG_ALPHA : 0U);
    const Index rows = image.height;
    const Index cols = image.width;
    if (rows == 0 || cols == 0) {
        png_image_free(&image);
        throw InputError("zero-dimension image: " + path.string());
    }
    std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw InputError("corrupt image: " + path.string() + " (" + msg + ")");
    }
    const int channels = PNG_IMAGE_SAMPLE_CHANNELS(image.format);
    return from_interleaved(buffer.data(), rows, cols, channels, color);
}

// Binary PGM (P5) and PPM (P6) with maxval <= 255.
RgbFrame decode_pnm(const std::vector<unsigned char>& bytes, const fs::path& path)
{
    std::size_t pos = 2;
    auto next_token = [&]() -> long {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
            throw InputError("corrupt image: malformed PNM header in " + path.string());
        }
        long value = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            value = value * 10 + (bytes[pos] - '0');
            if (value > (1L << 30)) throw InputError("corrupt image: PNM header value too large in " + path.string());
            ++pos;
        }
        return value;
    };
    const bool color = bytes[1] == '6';
    const long cols = next_token();
    const long rows = next_token();
    const long maxval = next_token();
    if (rows == 0 || cols == 0) {
        throw InputError("zero-dimension image: " + path.string());
    }
    if (maxval <= 0 || maxval > 255) {
        throw InputError("unsupported format: PNM maxval " + std::to_string(maxval) + " in " + path.string());
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw InputError("corrupt image: malformed PNM header in " + path.string());
    }
    ++pos;
    const int channels = color ? 3 : 1;
    const std::size_t need = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * channels;
    if (bytes.size() - pos < need) {
        throw InputError("corrupt image: truncated pixel data in " + path.string());
    }
    return from_interleaved(bytes.data() + pos, rows, cols, channels, color);
}

unsigned char to_byte(double v)
{
    return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
}

bool is_gray(const RgbFrame& image)
{
    return image.channels[0] == image.channels[1] && image.channels[0] == image.channels[2];
}

std::vector<unsigned char> interleave(const RgbFrame& image, int channels)
{
    std::vector<unsigned char> out(static_cast<std::size_t>(image.rows() * image.cols() * channels));
    std::size_t k = 0;
    for (Index r = 0; r < image.rows(); ++r) {
        for (Index c = 0; c < image.cols(); ++c) {
            for (int ch = 0; ch < channels; ++ch) {
                out[k++] = to_byte(image.channels[ch](r, c));
            }
        }
    }
    return out;
}

} // namespace

RgbFrame load_frame(const fs::path& path)
{
    const auto bytes = read_bytes(path);
    static constexpr unsigned char kPngSignature[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::equal(std::begin(kPngSignature), std::end(kPngSignature), bytes.begin())) {
        return decode_png(bytes, path);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
        return decode_pnm(bytes, path);
    }
    if (bytes.empty()) {
        throw InputError("corrupt image: empty file " + path.string());
    }
    throw InputError("unsupported format: " + path.string());
}

void save_png(const fs::path& path, const RgbFrame& image)
{
    const bool gray = is_gray(image);
    const int channels = gray ? 1 : 3;
    auto data = interleave(image, channels);
    png_image out{};
    out.version = PNG_IMAGE_VERSION;
    out.width = static_cast<png_uint_32>(image.cols());
    out.height = static_cast<png_uint_32>(image.rows());
    out.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&out, path.string().c_str(), 0, data.data(), 0, nullptr)) {
        std::string msg = out.message;
        png_image_free(&out);
        throw InputError("cannot write PNG " + path.string() + ": " + msg);
    }
}

void save_png(const fs::path& path, const Frame& gray)
{
    save_png(path, RgbFrame::from_gray(gray));
}

void save_pnm(const fs::path& path, const RgbFrame& image)
{
    const bool gray = is_gray(image);
    const int channels = gray ? 1 : 3;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << (gray ? "P5\n" : "P6\n") << image.cols() << ' ' << image.rows() << "\n255\n";
    const auto data = interleave(image, channels);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

void save_pnm(const fs::path& path, const Frame& gray)
{
    save_pnm(path, RgbFrame::from_gray(gray));
}

Frame to_luminance(const RgbFrame& image)
{
    // 0.299 R + 0.587 G + 0.114 B, arranged so that gray input is returned exactly.
    return image.green() + 0.299 * (image.red() - image.green()) + 0.114 * (image.blue() - image.green());
}

Frame rescale_nearest(const Frame& frame, Index out_rows, Index out_cols)
{
    if (out_rows <= 0 || out_cols <= 0) {
        throw std::invalid_argument("rescale target must be positive");
    }
    if (out_rows > frame.rows() || out_cols > frame.cols()) {
        throw std::invalid_argument("upscaling not supported: " + shape_string(frame.rows(), frame.cols()) +
                                    " -> " + shape_string(out_rows, out_cols));
    }
    Frame out(out_rows, out_cols);
    for (Index i = 0; i < out_rows; ++i) {
        const Index si = i * frame.rows() / out_rows;
        for (Index j = 0; j < out_cols; ++j) {
            out(i, j) = frame(si, j * frame.cols() / out_cols);
        }
    }
    return out;
}

Frame harmonize_resolution(const Frame& frame, Index rows, Index cols)
{
    if (frame.rows() == rows && frame.cols() == cols) {
        return frame;
    }
    if (frame.rows() < rows || frame.cols() < cols) {
        throw CompatibilityError("frame resolution " + shape_string(frame.rows(), frame.cols()) +
                                 " is smaller than the enrollment resolution " + shape_string(rows, cols));
    }
    return rescale_nearest(frame, rows, cols);
}

std::vector<fs::path> list_frames(const fs::path& dir)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw InputError("frame directory does not exist: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = lower_extension(entry.path());
        if (ext == ".png" || ext == ".pgm" || ext == ".ppm") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

Frame load_luminance(const fs::path& path, std::optional<std::array<Index, 2>> target)
{
    Frame frame = to_luminance(load_frame(path));
    if (target) {
        frame = harmonize_resolution(frame, (*target)[0], (*target)[1]);
    }
    return frame;
}

FrameSequence::FrameSequence(fs::path dir, std::optional<std::array<Index, 2>> target)
    : dir_(std::move(dir)), files_(list_frames(dir_)), target_(target)
{
    if (files_.empty()) {
        throw InputError("no frames found in " + dir_.string());
    }
}

Frame FrameSequence::load(std::size_t i) const
{
    return load_luminance(files_.at(i), target_);
}

} // namespace prnu
