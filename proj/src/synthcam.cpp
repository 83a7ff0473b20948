#include "prnu/synthcam.hpp"

#include "prnu/fingerprint.hpp"
#include "prnu/imaging.hpp"
#include "prnu/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

namespace prnu {
namespace fs = std::filesystem;

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(c)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::string frame_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06zu.png", i);
    return buf;
}

} // namespace

void SyntheticCamera::reseed(std::uint64_t stream)
{
    rng.seed(derive_seed(seed, 0x6e6f697365ULL, stream));
}

SyntheticCamera make_camera(std::string id, std::uint64_t seed, Index rows, Index cols, double strength)
{
    if (!(strength > 0.0 && strength <= 0.2)) {
        throw std::invalid_argument("synthetic camera strength must be in (0, 0.2]");
    }
    if (rows < kMinFrameSide || cols < kMinFrameSide) {
        throw std::invalid_argument("synthetic camera must be at least 16x16");
    }
    SyntheticCamera cam;
    cam.id = std::move(id);
    cam.seed = seed;
    cam.strength = strength;
    std::mt19937_64 k_rng(derive_seed(seed, 0x4b));
    std::normal_distribution<double> normal(0.0, strength);
    cam.prnu.resize(rows, cols);
    for (Index i = 0; i < cam.prnu.size(); ++i) cam.prnu.data()[i] = normal(k_rng);
    cam.prnu.array() -= cam.prnu.mean();
    cam.reseed(0);
    return cam;
}

Frame capture(SyntheticCamera& camera, const Frame& scene, double sigma_add)
{
    if (!same_shape(scene, camera.prnu)) {
        throw std::invalid_argument("capture: scene " + shape_string(scene.rows(), scene.cols()) +
                                    " does not match camera " + shape_string(camera.rows(), camera.cols()));
    }
    if (sigma_add < 0) {
        throw std::invalid_argument("capture: sigma_add must be non-negative");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Frame out = (1.0 + camera.prnu.array()) * scene.array();
    for (Index i = 0; i < out.size(); ++i) {
        out.data()[i] = std::clamp(out.data()[i] + sigma_add * normal(camera.rng), 0.0, 255.0);
    }
    return out;
}

namespace scenes {

Frame flat(Index rows, Index cols, double value)
{
    return Frame::Constant(rows, cols, value);
}

Frame gradient(Index rows, Index cols, double low, double high, double angle)
{
    const double dx = std::cos(angle), dy = std::sin(angle);
    Frame out(rows, cols);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            out(r, c) = c * dx + r * dy;
            lo = std::min(lo, out(r, c));
            hi = std::max(hi, out(r, c));
        }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    return ((out.array() - lo) / span * (high - low) + low).matrix();
}

Frame texture(Index rows, Index cols, std::uint64_t seed, double mean, double amplitude, double time)
{
    constexpr int kComponents = 6;
    std::mt19937_64 rng(derive_seed(seed, 0x7465));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    struct Wave {
        double kx, ky, phase, speed, weight;
    };
    std::vector<Wave> waves;
    double total_weight = 0;
    for (int i = 0; i < kComponents; ++i) {
        const double wavelength = 10.0 + 38.0 * unit(rng);
        const double theta = 2.0 * std::numbers::pi * unit(rng);
        const double k = 2.0 * std::numbers::pi / wavelength;
        Wave w{k * std::cos(theta), k * std::sin(theta), 2.0 * std::numbers::pi * unit(rng), 0.05 + 0.1 * unit(rng),
               0.5 + unit(rng)};
        total_weight += w.weight;
        waves.push_back(w);
    }
    Frame out = Frame::Zero(rows, cols);
    for (const auto& w : waves) {
        const double phase = w.phase + w.speed * time;
        for (Index r = 0; r < rows; ++r) {
            for (Index c = 0; c < cols; ++c) out(r, c) += w.weight * std::sin(w.kx * c + w.ky * r + phase);
        }
    }
    return (mean + amplitude / total_weight * out.array()).matrix();
}

Frame training_frame(Index rows, Index cols, std::uint64_t seed, std::size_t t, std::size_t total)
{
    constexpr std::size_t kSegments = 6;
    static constexpr double kFlatLevels[] = {90.0, 130.0, 170.0};
    const std::size_t segment = total == 0 ? 0 : t * kSegments / total;
    if (segment % 2 == 0) {
        return flat(rows, cols, kFlatLevels[(segment / 2) % 3]);
    }
    return texture(rows, cols, derive_seed(seed, segment), 128.0, 60.0, static_cast<double>(t));
}

Frame test_frame(Index rows, Index cols, std::uint64_t seed, std::size_t t)
{
    std::mt19937_64 rng(derive_seed(seed, 0x7465737));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double mean = 100.0 + 50.0 * unit(rng);
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    const double tex_amp = 25.0 + 20.0 * unit(rng);
    // Gradient spans +-15 around zero; texture + gradient stay inside [kLow, kHigh].
    Frame scene = texture(rows, cols, seed, mean, tex_amp, static_cast<double>(t));
    scene += gradient(rows, cols, -15.0, 15.0, angle);
    return scene;
}

} // namespace scenes

DatasetManifest write_synthetic_dataset(const fs::path& out, const SynthOptions& o, unsigned threads)
{
    if (o.cameras == 0 || o.train_frames == 0 || o.test_frames == 0) {
        throw std::invalid_argument("synth: cameras and frame counts must be positive");
    }
    if (!(o.sigma_add >= 0)) {
        throw std::invalid_argument("synth: sigma_add must be non-negative");
    }
    fs::create_directories(out / "truth");
    DatasetManifest manifest;
    manifest.resolution = std::array<Index, 2>{o.rows, o.cols};
    manifest.rate = o.rate;
    manifest.seed = o.seed;

    std::vector<std::string> ids;
    for (std::size_t c = 0; c < o.cameras; ++c) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "cam%02zu", c);
        ids.emplace_back(buf);
    }

    parallel_for(o.cameras, threads, [&](std::size_t c) {
        SyntheticCamera cam = make_camera(ids[c], derive_seed(o.seed, c), o.rows, o.cols, o.strength);
        write_fingerprint(out / "truth" / (ids[c] + ".prnufp"), Fingerprint{ids[c], cam.prnu, 0});

        const fs::path train = out / ids[c] / "train";
        fs::create_directories(train);
        cam.reseed(0);
        const std::uint64_t train_seed = derive_seed(o.seed, c, 0x747261696e);
        for (std::size_t t = 0; t < o.train_frames; ++t) {
            save_png(train / frame_name(t),
                     capture(cam, scenes::training_frame(o.rows, o.cols, train_seed, t, o.train_frames), o.sigma_add));
        }
        for (std::size_t v = 0; v < o.test_videos; ++v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "test_%02zu", v);
            const fs::path dir = out / ids[c] / buf;
            fs::create_directories(dir);
            cam.reseed(v + 1);
            const std::uint64_t scene_seed = derive_seed(o.seed, c, 0x74657374, v);
            for (std::size_t t = 0; t < o.test_frames; ++t) {
                save_png(dir / frame_name(t), capture(cam, scenes::test_frame(o.rows, o.cols, scene_seed, t), o.sigma_add));
            }
        }
    });

    for (std::size_t c = 0; c < o.cameras; ++c) {
        manifest.cameras.push_back({ids[c], {out / ids[c] / "train"}});
    }
    for (std::size_t c = 0; c < o.cameras; ++c) {
        for (std::size_t v = 0; v < o.test_videos; ++v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "test_%02zu", v);
            const fs::path dir = out / ids[c] / buf;
            manifest.tests.push_back({ids[c] + "/" + buf, dir, ids[c], o.variant});
        }
    }
    const auto doc = manifest_to_json(manifest, out);
    std::ofstream(out / "manifest.json", std::ios::trunc) << doc.dump(2) << '\n';
    manifest.source = out / "manifest.json";
    return manifest;
}

} // namespace prnu
