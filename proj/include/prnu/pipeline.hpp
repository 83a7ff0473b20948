#ifndef PRNU_PIPELINE_HPP
#define PRNU_PIPELINE_HPP

#include "prnu/identify.hpp"
#include "prnu/imaging.hpp"
#include "prnu/manifest.hpp"
#include "prnu/sampling.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <span>

namespace prnu {

/// Runs fn(0..count-1) on up to `threads` workers. Each index runs exactly once;
/// the first exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Feeds every sample of `video` under each plan to `sink(plan_index, split)`.
/// Select-mode plans share one residual computation per frame index; each plan
/// still receives its samples in plan order.
void for_each_sample(const FrameSequence& video, std::span<const SamplingPlan> plans, const DenoiseParams& denoise,
                     const std::function<void(std::size_t, const NoiseSplit&)>& sink);

/// Rows and cols fingerprints are enrolled at: the manifest's resolution, or
/// the first training frame's size.
std::array<Index, 2> enrollment_resolution(const DatasetManifest& manifest);

/// Builds one registry per sampling rate, reusing each training residual
/// across rates. Cameras are processed in parallel; results do not depend on
/// the thread count.
std::vector<Registry> enroll_rates(const DatasetManifest& manifest, std::span<const std::size_t> rates,
                                   bool average_train, const DenoiseParams& denoise, unsigned threads = 1);

Registry enroll(const DatasetManifest& manifest, std::size_t rate, bool average_train,
                const DenoiseParams& denoise = {}, unsigned threads = 1);

/// Writes <id>.prnufp per camera plus registry.json recording enrollment order.
void save_registry(const Registry& registry, const std::filesystem::path& dir);
/// Loads registry.json order when present, else every *.prnufp sorted by name.
Registry load_registry(const std::filesystem::path& dir);

/// Identifies one frame directory. Frames larger than the registry resolution
/// are downscaled before sampling.
IdentificationResult identify_video(const Registry& registry, const std::filesystem::path& video,
                                    const MethodConfig& method, std::size_t rate, bool average_run,
                                    const IdentifyOptions& options = {});

nlohmann::json to_json(const IdentificationResult& result);

} // namespace prnu

#endif // PRNU_PIPELINE_HPP
