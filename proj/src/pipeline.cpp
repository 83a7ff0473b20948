#include "prnu/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace prnu {
namespace fs = std::filesystem;
using nlohmann::json;

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn)
{
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed = true;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void for_each_sample(const FrameSequence& video, std::span<const SamplingPlan> plans, const DenoiseParams& denoise,
                     const std::function<void(std::size_t, const NoiseSplit&)>& sink)
{
    std::map<std::size_t, std::vector<std::size_t>> select_users;
    for (std::size_t p = 0; p < plans.size(); ++p) {
        if (plans[p].mode != SamplingMode::select) continue;
        for (const auto& group : plans[p].groups) select_users[group.front()].push_back(p);
    }
    for (const auto& [index, users] : select_users) {
        const NoiseSplit split = split_noise(video.load(index), denoise);
        for (std::size_t p : users) sink(p, split);
    }
    for (std::size_t p = 0; p < plans.size(); ++p) {
        if (plans[p].mode != SamplingMode::average) continue;
        for (const auto& group : plans[p].groups) {
            std::vector<Frame> frames;
            frames.reserve(group.size());
            for (std::size_t i : group) frames.push_back(video.load(i));
            sink(p, split_noise(average_block(frames), denoise));
        }
    }
}

std::array<Index, 2> enrollment_resolution(const DatasetManifest& manifest)
{
    if (manifest.resolution) return *manifest.resolution;
    if (manifest.cameras.empty() || manifest.cameras.front().training.empty()) {
        throw InputError("manifest has no training videos");
    }
    const FrameSequence first(manifest.cameras.front().training.front());
    const Frame f = first.load(0);
    return {f.rows(), f.cols()};
}

std::vector<Registry> enroll_rates(const DatasetManifest& manifest, std::span<const std::size_t> rates,
                                   bool average_train, const DenoiseParams& denoise, unsigned threads)
{
    if (rates.empty()) {
        throw std::invalid_argument("enroll: no sampling rates given");
    }
    const auto resolution = enrollment_resolution(manifest);
    const SamplingMode mode = average_train ? SamplingMode::average : SamplingMode::select;
    // fingerprints[camera][rate]
    std::vector<std::vector<Fingerprint>> fingerprints(manifest.cameras.size());
    parallel_for(manifest.cameras.size(), threads, [&](std::size_t c) {
        const CameraEntry& camera = manifest.cameras[c];
        std::vector<FingerprintAccumulator> accs(rates.size(), FingerprintAccumulator(resolution[0], resolution[1]));
        for (const auto& dir : camera.training) {
            const FrameSequence video(dir, resolution);
            std::vector<SamplingPlan> plans;
            for (std::size_t rate : rates) plans.push_back(plan_sampling(video.size(), rate, mode));
            for_each_sample(video, plans, denoise, [&](std::size_t p, const NoiseSplit& split) { accs[p].add(split); });
        }
        for (std::size_t r = 0; r < rates.size(); ++r) {
            if (accs[r].frame_count() == 0) {
                throw InputError("camera '" + camera.id + "' has no usable training frames at rate 1/" +
                                 std::to_string(rates[r]));
            }
            fingerprints[c].push_back(finalize(accs[r], camera.id));
        }
    });
    std::vector<Registry> registries(rates.size());
    for (std::size_t r = 0; r < rates.size(); ++r) {
        for (auto& per_camera : fingerprints) registries[r].add(std::move(per_camera[r]));
    }
    return registries;
}

Registry enroll(const DatasetManifest& manifest, std::size_t rate, bool average_train, const DenoiseParams& denoise,
                unsigned threads)
{
    const std::size_t rates[] = {rate};
    return std::move(enroll_rates(manifest, rates, average_train, denoise, threads).front());
}

void save_registry(const Registry& registry, const fs::path& dir)
{
    fs::create_directories(dir);
    json index = json::array();
    for (const auto& fp : registry.entries()) {
        const std::string file = fp.camera_id + ".prnufp";
        write_fingerprint(dir / file, fp);
        index.push_back({{"id", fp.camera_id}, {"file", file}});
    }
    std::ofstream out(dir / "registry.json", std::ios::trunc);
    out << json{{"fingerprints", index}}.dump(2) << '\n';
}

Registry load_registry(const fs::path& dir)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw InputError("fingerprint directory does not exist: " + dir.string());
    }
    std::vector<fs::path> files;
    if (fs::exists(dir / "registry.json")) {
        std::ifstream in(dir / "registry.json");
        try {
            const json index = json::parse(in);
            for (const auto& e : index.at("fingerprints")) files.push_back(dir / e.at("file").get<std::string>());
        } catch (const json::exception& e) {
            throw InputError("malformed registry.json in " + dir.string() + ": " + e.what());
        }
    } else {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".prnufp") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) {
        throw InputError("no fingerprints found in " + dir.string());
    }
    Registry registry;
    for (const auto& f : files) registry.add(read_fingerprint(f));
    return registry;
}

IdentificationResult identify_video(const Registry& registry, const fs::path& video, const MethodConfig& method,
                                    std::size_t rate, bool average_run, const IdentifyOptions& options)
{
    if (registry.empty()) {
        throw std::invalid_argument("identify: empty registry");
    }
    const FrameSequence frames(video, std::array<Index, 2>{registry.rows(), registry.cols()});
    const SamplingPlan plan =
        plan_sampling(frames.size(), rate, average_run ? SamplingMode::average : SamplingMode::select);
    if (plan.groups.empty()) {
        throw InputError("video " + video.string() + " has fewer than " + std::to_string(rate) +
                         " frames; no averaging block fits");
    }
    VideoIdentifier identifier(registry, method, options);
    for_each_sample(frames, std::span(&plan, 1), options.denoise, [&](std::size_t, const NoiseSplit& split) {
        if (identifier.wants_scores()) {
            identifier.add(split, score_split(split, registry, options));
        } else {
            identifier.add(split, {});
        }
    });
    return identifier.result();
}

json to_json(const IdentificationResult& r)
{
    const char* kind = r.method.method == Method::voting              ? "votes"
                       : r.method.method == Method::pce_vectors      ? "mean_pce"
                       : r.method.metric == PatternMetric::pearson ? "pearson"
                                                                   : "pce";
    return {{"predicted", r.predicted},
            {"method", r.method.name()},
            {"cameras", r.cameras},
            {"evidence_kind", kind},
            {"evidence", r.evidence}, // aligned with "cameras"
            {"frames_used", r.frames_used},
            {"frames_skipped", r.frames_skipped},
            {"tie", r.tie}};
}

} // namespace prnu
