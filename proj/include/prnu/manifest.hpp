#ifndef PRNU_MANIFEST_HPP
#define PRNU_MANIFEST_HPP

#include "prnu/types.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prnu {

/// Whether frames are block-averaged (instead of picked) when training and when identifying.
struct AveragingConfig {
    bool train = false;
    bool run = false;

    bool operator==(const AveragingConfig&) const = default;
};

/// Accepts none, train, run, both.
AveragingConfig parse_averaging(std::string_view text);
std::string to_string(const AveragingConfig& averaging);

struct CameraEntry {
    std::string id;
    std::vector<std::filesystem::path> training; // frame directories, one per video
};

struct TestEntry {
    std::string name;
    std::filesystem::path video;
    std::optional<std::string> truth;
    std::string variant = "default";
};

struct DatasetManifest {
    std::filesystem::path source; // manifest file; relative paths resolve against its directory
    std::vector<CameraEntry> cameras;
    std::vector<TestEntry> tests;
    std::optional<std::array<Index, 2>> resolution; // rows, cols
    std::size_t rate = 10;
    AveragingConfig averaging;
    std::optional<double> sigma0;
    std::uint64_t seed = 0;

    std::vector<std::string> camera_ids() const;
};

/// Parses and validates a manifest document. Paths are resolved against
/// `base_dir`; with `check_paths`, every directory must exist and hold frames.
DatasetManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                               bool check_paths = true);
DatasetManifest parse_manifest(const std::filesystem::path& path);

/// Serialises a manifest; paths are written relative to `base_dir` when possible.
nlohmann::json manifest_to_json(const DatasetManifest& manifest, const std::filesystem::path& base_dir);

} // namespace prnu

#endif // PRNU_MANIFEST_HPP
