#include "prnu/manifest.hpp"

#include "prnu/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

namespace prnu {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what)
{
    throw InputError("manifest: " + where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object()) schema_error(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(where + "." + key, "missing required field");
    return *it;
}

std::string get_string(const json& v, const std::string& where)
{
    if (!v.is_string()) schema_error(where, "expected a string");
    return v.get<std::string>();
}

std::uint64_t get_count(const json& v, const std::string& where, std::uint64_t min)
{
    if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min)) {
        schema_error(where, "expected an integer >= " + std::to_string(min));
    }
    return v.get<std::uint64_t>();
}

bool get_flag(const json& v, const std::string& where)
{
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "yes" || s == "YES" || s == "true") return true;
        if (s == "no" || s == "NO" || s == "false") return false;
    }
    schema_error(where, "expected a boolean or yes/no");
}

bool valid_id(const std::string& id)
{
    return !id.empty() && id.size() <= 128 && std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    }) && id != "." && id != "..";
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    fs::path path(p);
    return path.is_absolute() ? path.lexically_normal() : (base / path).lexically_normal();
}

void check_frames(const fs::path& dir, const std::string& where)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) schema_error(where, "missing directory " + dir.string());
    if (list_frames(dir).empty()) schema_error(where, "no frames found in " + dir.string());
}

} // namespace

AveragingConfig parse_averaging(std::string_view text)
{
    if (text == "none") return {false, false};
    if (text == "train") return {true, false};
    if (text == "run") return {false, true};
    if (text == "both") return {true, true};
    throw std::invalid_argument("unknown averaging mode '" + std::string(text) + "' (expected train, run, both, none)");
}

std::string to_string(const AveragingConfig& a)
{
    if (a.train && a.run) return "both";
    if (a.train) return "train";
    if (a.run) return "run";
    return "none";
}

std::vector<std::string> DatasetManifest::camera_ids() const
{
    std::vector<std::string> ids;
    for (const auto& c : cameras) ids.push_back(c.id);
    return ids;
}

DatasetManifest parse_manifest(const json& doc, const fs::path& base_dir, bool check_paths)
{
    if (!doc.is_object()) schema_error("<root>", "expected an object");
    DatasetManifest m;

    if (const auto it = doc.find("resolution"); it != doc.end()) {
        const auto rows = get_count(require(*it, "rows", "resolution"), "resolution.rows", kMinFrameSide);
        const auto cols = get_count(require(*it, "cols", "resolution"), "resolution.cols", kMinFrameSide);
        m.resolution = std::array<Index, 2>{static_cast<Index>(rows), static_cast<Index>(cols)};
    }
    if (const auto it = doc.find("sampling"); it != doc.end()) {
        if (!it->is_object()) schema_error("sampling", "expected an object");
        if (const auto r = it->find("rate"); r != it->end()) m.rate = get_count(*r, "sampling.rate", 1);
        if (const auto a = it->find("average"); a != it->end()) {
            if (a->is_string()) {
                try {
                    m.averaging = parse_averaging(a->get<std::string>());
                } catch (const std::invalid_argument& e) {
                    schema_error("sampling.average", e.what());
                }
            } else if (a->is_object()) {
                if (const auto t = a->find("train"); t != a->end()) m.averaging.train = get_flag(*t, "sampling.average.train");
                if (const auto r = a->find("run"); r != a->end()) m.averaging.run = get_flag(*r, "sampling.average.run");
            } else {
                schema_error("sampling.average", "expected an object {train, run} or one of none/train/run/both");
            }
        }
    }
    if (const auto it = doc.find("denoise"); it != doc.end()) {
        if (const auto s = it->find("sigma0"); s != it->end()) {
            if (!s->is_number() || !(s->get<double>() > 0)) schema_error("denoise.sigma0", "expected a positive number");
            m.sigma0 = s->get<double>();
        }
    }
    if (const auto it = doc.find("seed"); it != doc.end()) m.seed = get_count(*it, "seed", 0);

    const json& cameras = require(doc, "cameras", "<root>");
    if (!cameras.is_array() || cameras.empty()) schema_error("cameras", "expected a non-empty array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        const std::string where = "cameras[" + std::to_string(i) + "]";
        CameraEntry cam;
        cam.id = get_string(require(cameras[i], "id", where), where + ".id");
        if (!valid_id(cam.id)) schema_error(where + ".id", "camera id '" + cam.id + "' must use [A-Za-z0-9_.-]");
        if (!seen.insert(cam.id).second) schema_error(where + ".id", "duplicate camera id '" + cam.id + "'");
        const json& train = require(cameras[i], "train", where);
        if (!train.is_array() || train.empty()) schema_error(where + ".train", "expected a non-empty array of directories");
        for (std::size_t k = 0; k < train.size(); ++k) {
            const std::string twhere = where + ".train[" + std::to_string(k) + "]";
            cam.training.push_back(resolve(base_dir, get_string(train[k], twhere)));
            if (check_paths) check_frames(cam.training.back(), twhere);
        }
        m.cameras.push_back(std::move(cam));
    }

    if (const auto it = doc.find("tests"); it != doc.end()) {
        if (!it->is_array()) schema_error("tests", "expected an array");
        std::set<std::string> names;
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "tests[" + std::to_string(i) + "]";
            const json& t = (*it)[i];
            TestEntry test;
            const std::string video = get_string(require(t, "video", where), where + ".video");
            test.video = resolve(base_dir, video);
            if (check_paths) check_frames(test.video, where + ".video");
            if (const auto tr = t.find("truth"); tr != t.end() && !tr->is_null()) {
                test.truth = get_string(*tr, where + ".truth");
                if (!seen.contains(*test.truth)) schema_error(where + ".truth", "unknown camera id '" + *test.truth + "'");
            }
            if (const auto v = t.find("variant"); v != t.end()) test.variant = get_string(*v, where + ".variant");
            if (const auto n = t.find("name"); n != t.end()) {
                test.name = get_string(*n, where + ".name");
            } else {
                test.name = fs::path(video).lexically_normal().generic_string();
            }
            if (!names.insert(test.name).second) schema_error(where + ".name", "duplicate test name '" + test.name + "'");
            m.tests.push_back(std::move(test));
        }
    }
    return m;
}

DatasetManifest parse_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open manifest " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    auto m = parse_manifest(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
    m.source = path;
    return m;
}

json manifest_to_json(const DatasetManifest& m, const fs::path& base_dir)
{
    auto rel = [&](const fs::path& p) { return p.lexically_relative(base_dir).generic_string(); };
    json doc;
    if (m.resolution) doc["resolution"] = {{"rows", (*m.resolution)[0]}, {"cols", (*m.resolution)[1]}};
    doc["sampling"] = {{"rate", m.rate}, {"average", {{"train", m.averaging.train}, {"run", m.averaging.run}}}};
    if (m.sigma0) doc["denoise"] = {{"sigma0", *m.sigma0}};
    doc["seed"] = m.seed;
    doc["cameras"] = json::array();
    for (const auto& c : m.cameras) {
        json train = json::array();
        for (const auto& t : c.training) train.push_back(rel(t));
        doc["cameras"].push_back({{"id", c.id}, {"train", train}});
    }
    doc["tests"] = json::array();
    for (const auto& t : m.tests) {
        json e = {{"name", t.name}, {"video", rel(t.video)}, {"variant", t.variant}};
        if (t.truth) e["truth"] = *t.truth;
        doc["tests"].push_back(std::move(e));
    }
    return doc;
}

} // namespace prnu
