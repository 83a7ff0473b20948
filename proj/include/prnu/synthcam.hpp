#ifndef PRNU_SYNTHCAM_HPP
#define PRNU_SYNTHCAM_HPP

#include "prnu/manifest.hpp"
#include "prnu/types.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace prnu {

/// A simulated sensor: out = (1 + K) * scene + additive Gaussian noise, clipped to [0, 255].
struct SyntheticCamera {
    std::string id;
    std::uint64_t seed = 0;
    double strength = 0.02;
    Frame prnu; // K, zero-mean
    std::mt19937_64 rng;

    Index rows() const { return prnu.rows(); }
    Index cols() const { return prnu.cols(); }
    /// Restarts the additive-noise stream from a derived seed.
    void reseed(std::uint64_t stream);
};

/// K ~ i.i.d. N(0, strength^2), then mean-removed. Reproducible per seed.
SyntheticCamera make_camera(std::string id, std::uint64_t seed, Index rows, Index cols, double strength = 0.02);

/// One capture of `scene`; advances the camera's noise generator.
Frame capture(SyntheticCamera& camera, const Frame& scene, double sigma_add);

namespace scenes {

/// Scene values produced by the generators stay inside this band.
inline constexpr double kLow = 40.0;
inline constexpr double kHigh = 215.0;

Frame flat(Index rows, Index cols, double value);
/// Linear ramp from `low` to `high` along direction `angle` (radians).
Frame gradient(Index rows, Index cols, double low, double high, double angle);
/// Smooth pseudo-random texture: a seeded sum of oriented sinusoids with
/// wavelengths of 10-48 px. `time` shifts each component's phase so
/// consecutive times give slowly drifting content.
Frame texture(Index rows, Index cols, std::uint64_t seed, double mean, double amplitude, double time = 0.0);

/// Frame t of a training video: alternating flat-field and textured segments.
Frame training_frame(Index rows, Index cols, std::uint64_t seed, std::size_t t, std::size_t total);
/// Frame t of a test video: drifting texture over a gentle gradient.
Frame test_frame(Index rows, Index cols, std::uint64_t seed, std::size_t t);

} // namespace scenes

struct SynthOptions {
    std::size_t cameras = 5;
    std::size_t train_frames = 100;
    std::size_t test_videos = 10; // per camera
    std::size_t test_frames = 100;
    Index rows = 128;
    Index cols = 128;
    double strength = 0.02;
    double sigma_add = 2.0;
    std::uint64_t seed = 7;
    std::size_t rate = 10;
    std::string variant = "synthetic";
};

/// Writes frame directories, ground-truth K files (truth/<id>.prnufp) and
/// manifest.json under `out`; returns the parsed manifest.
DatasetManifest write_synthetic_dataset(const std::filesystem::path& out, const SynthOptions& options,
                                        unsigned threads = 1);

} // namespace prnu

#endif // PRNU_SYNTHCAM_HPP
