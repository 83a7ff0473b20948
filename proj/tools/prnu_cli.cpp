// prnu: source camera identification from video frame directories.
//
// Exit codes: 0 success, 1 internal error, 2 input error, 3 configuration or
// compatibility error.

#include "prnu/evaluation.hpp"
#include "prnu/pipeline.hpp"
#include "prnu/synthcam.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kInput = 2, kConfig = 3 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::optional<double> sigma0;
    unsigned threads = 1;
    std::string template_mode = "modulated";
};

prnu::IdentifyOptions identify_options(const CommonOptions& common, const prnu::DatasetManifest* manifest)
{
    prnu::IdentifyOptions options;
    if (common.sigma0) {
        options.denoise.sigma0 = *common.sigma0;
    } else if (manifest && manifest->sigma0) {
        options.denoise.sigma0 = *manifest->sigma0;
    }
    if (!(options.denoise.sigma0 > 0)) throw ConfigError("--sigma0 must be positive");
    try {
        options.template_mode = prnu::parse_template_mode(common.template_mode);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return options;
}

prnu::AveragingConfig averaging_or(const std::string& flag, const prnu::AveragingConfig& fallback)
{
    if (flag.empty()) return fallback;
    try {
        return prnu::parse_averaging(flag);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::vector<prnu::MethodConfig> parse_methods(const std::string& spec, bool normalize, const std::string& metric)
{
    std::vector<std::string> names;
    if (spec == "all") {
        names = {"voting", "patcorr", "pcevec"};
    } else if (spec == "all-variants") {
        names = {"voting", "patcorr", "patcorr-pce", "pcevec", "pcevec-norm"};
    } else {
        std::stringstream ss(spec);
        for (std::string item; std::getline(ss, item, ',');) {
            if (!item.empty()) names.push_back(item);
        }
    }
    std::vector<prnu::MethodConfig> out;
    for (const auto& n : names) {
        try {
            auto m = prnu::MethodConfig::parse(n);
            if (m.method == prnu::Method::pce_vectors && normalize) m.normalize = true;
            if (m.method == prnu::Method::pattern_correlation && !metric.empty()) {
                if (metric == "pce") m.metric = prnu::PatternMetric::pce;
                else if (metric == "pearson") m.metric = prnu::PatternMetric::pearson;
                else throw ConfigError("unknown metric '" + metric + "' (expected pearson or pce)");
            }
            out.push_back(m);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (out.empty()) throw ConfigError("no methods selected");
    return out;
}

std::vector<std::size_t> parse_rates(const std::string& spec)
{
    std::vector<std::size_t> rates;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t pos = 0;
            const long v = std::stol(item, &pos);
            if (pos != item.size() || v < 1) throw std::invalid_argument(item);
            rates.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError("invalid rate '" + item + "' (expected positive integers N for rate 1/N)");
        }
    }
    if (rates.empty()) throw ConfigError("--rates is empty");
    return rates;
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw prnu::InputError("cannot write " + path.string());
    out << text;
}

void emit_json(const json& doc, const std::string& out_path)
{
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text(out_path, text);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"PRNU sensor-fingerprint source camera identification for videos"};
    app.require_subcommand(1);
    CommonOptions common;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--sigma0", common.sigma0, "Wavelet-domain noise std on the 0-255 scale (default 5)");
        cmd->add_option("--threads", common.threads, "Worker threads (1 = sequential reference)")
            ->check(CLI::Range(1u, 256u));
        cmd->add_option("--template", common.template_mode, "Per-frame PCE template: modulated or raw");
    };

    // enroll
    std::string manifest_path, out_dir, average_flag;
    std::optional<std::size_t> rate;
    auto* enroll = app.add_subcommand("enroll", "Build one fingerprint file per camera in the manifest");
    enroll->add_option("--manifest", manifest_path, "Dataset manifest (JSON)")->required();
    enroll->add_option("--rate", rate, "Use one frame (or one N-frame average) out of every N");
    enroll->add_option("--average", average_flag, "Averaging phases: train, run, both, none");
    enroll->add_option("--out", out_dir, "Output directory (default: <manifest dir>/fingerprints)");
    add_common(enroll);

    // identify
    std::string fingerprints_dir, video_dir, method_name = "voting", metric;
    bool normalize = false;
    auto* identify = app.add_subcommand("identify", "Identify the source camera of one frame directory");
    auto* fp_opt = identify->add_option("--fingerprints", fingerprints_dir, "Directory written by enroll");
    auto* mf_opt = identify->add_option("--manifest", manifest_path, "Enroll from this manifest instead");
    fp_opt->excludes(mf_opt);
    identify->add_option("--video", video_dir, "Directory of frame_NNNNNN.png files")->required();
    identify->add_option("--method", method_name, "voting, patcorr or pcevec");
    identify->add_option("--metric", metric, "patcorr metric: pearson or pce");
    identify->add_flag("--normalize", normalize, "pcevec: divide each frame vector by its maximum");
    identify->add_option("--rate", rate, "Sampling rate denominator N");
    identify->add_option("--average", average_flag, "Averaging phases: train, run, both, none");
    add_common(identify);

    // evaluate
    std::string methods_spec = "voting", out_path;
    bool average_matrix = false;
    auto* evaluate = app.add_subcommand("evaluate", "Confusion matrices over the manifest's test videos");
    evaluate->add_option("--manifest", manifest_path, "Dataset manifest (JSON)")->required();
    evaluate->add_option("--method", methods_spec, "Method list, or all / all-variants");
    evaluate->add_option("--metric", metric, "patcorr metric: pearson or pce");
    evaluate->add_flag("--normalize", normalize, "pcevec: normalise per-frame vectors");
    evaluate->add_option("--rate", rate, "Sampling rate denominator N");
    evaluate->add_option("--average", average_flag, "Averaging phases: train, run, both, none");
    evaluate->add_flag("--average-matrix", average_matrix,
                       "Run all four train/run averaging combinations and print the table");
    evaluate->add_option("--out", out_path, "Write the JSON report here instead of stdout");
    add_common(evaluate);

    // sweep
    std::string rates_spec = "30,25,20,15,10";
    auto* sweep_cmd = app.add_subcommand("sweep", "Error rate per method for every sampling rate");
    sweep_cmd->add_option("--manifest", manifest_path, "Dataset manifest (JSON)")->required();
    sweep_cmd->add_option("--rates", rates_spec, "Comma-separated N values");
    sweep_cmd->add_option("--methods", methods_spec, "Method list, or all / all-variants");
    sweep_cmd->add_option("--average", average_flag, "Averaging phases: train, run, both, none");
    sweep_cmd->add_option("--out", out_dir, "Output directory for sweep.json and sweep.csv");
    add_common(sweep_cmd);

    // synth
    prnu::SynthOptions synth_opts;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic multi-camera dataset with ground truth");
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--cameras", synth_opts.cameras, "Number of cameras")->check(CLI::Range(1, 1000));
    synth->add_option("--frames", synth_opts.test_frames, "Frames per test video")->check(CLI::PositiveNumber);
    synth->add_option("--train-frames", synth_opts.train_frames, "Frames per training video (default: --frames)");
    synth->add_option("--tests", synth_opts.test_videos, "Test videos per camera");
    synth->add_option("--rows", synth_opts.rows, "Frame rows")->check(CLI::Range(16, 8192));
    synth->add_option("--cols", synth_opts.cols, "Frame columns")->check(CLI::Range(16, 8192));
    synth->add_option("--strength", synth_opts.strength, "PRNU std")->check(CLI::Range(1e-6, 0.2));
    synth->add_option("--sigma-add", synth_opts.sigma_add, "Additive noise std")->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", synth_opts.seed, "Generator seed");
    synth->add_option("--threads", common.threads, "Worker threads")->check(CLI::Range(1u, 256u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (*synth) {
            if (synth->count("--train-frames") == 0) synth_opts.train_frames = synth_opts.test_frames;
            const auto manifest = prnu::write_synthetic_dataset(synth_out, synth_opts, common.threads);
            std::cout << json{{"manifest", manifest.source.string()},
                              {"cameras", manifest.camera_ids()},
                              {"tests", manifest.tests.size()}}
                             .dump(2)
                      << '\n';
            return kOk;
        }

        if (*enroll) {
            const auto manifest = prnu::parse_manifest(manifest_path);
            const auto options = identify_options(common, &manifest);
            const auto avg = averaging_or(average_flag, manifest.averaging);
            const std::size_t n = rate.value_or(manifest.rate);
            if (n == 0) throw ConfigError("--rate must be >= 1");
            const auto registry = prnu::enroll(manifest, n, avg.train, options.denoise, common.threads);
            const fs::path dir = out_dir.empty() ? fs::path(manifest_path).parent_path() / "fingerprints" : fs::path(out_dir);
            prnu::save_registry(registry, dir);
            json files = json::array();
            for (const auto& fp : registry.entries()) {
                files.push_back({{"id", fp.camera_id}, {"frames", fp.frame_count},
                                 {"file", (dir / (fp.camera_id + ".prnufp")).string()}});
            }
            std::cout << json{{"fingerprints", files},
                              {"rate", n},
                              {"average_train", avg.train},
                              {"sigma0", options.denoise.sigma0}}
                             .dump(2)
                      << '\n';
            return kOk;
        }

        if (*identify) {
            std::optional<prnu::DatasetManifest> manifest;
            prnu::Registry registry;
            if (!manifest_path.empty()) manifest = prnu::parse_manifest(manifest_path);
            const auto options = identify_options(common, manifest ? &*manifest : nullptr);
            const auto avg = averaging_or(average_flag, manifest ? manifest->averaging : prnu::AveragingConfig{});
            const std::size_t n = rate.value_or(manifest ? manifest->rate : 10);
            if (n == 0) throw ConfigError("--rate must be >= 1");
            const auto method = parse_methods(method_name, normalize, metric);
            if (method.size() != 1) throw ConfigError("identify takes exactly one --method");
            if (manifest) {
                registry = prnu::enroll(*manifest, n, avg.train, options.denoise, common.threads);
            } else if (!fingerprints_dir.empty()) {
                registry = prnu::load_registry(fingerprints_dir);
            } else {
                throw ConfigError("identify needs --fingerprints or --manifest");
            }
            if (registry.size() < 2) throw ConfigError("identify needs at least two enrolled cameras");
            const auto result = prnu::identify_video(registry, video_dir, method.front(), n, avg.run, options);
            json doc = prnu::to_json(result);
            doc["config"] = {{"video", video_dir},
                             {"method", method.front().name()},
                             {"metric", prnu::to_string(method.front().metric)},
                             {"normalize", method.front().normalize},
                             {"rate", n},
                             {"average", {{"train", avg.train}, {"run", avg.run}}},
                             {"sigma0", options.denoise.sigma0},
                             {"template", prnu::to_string(options.template_mode)}};
            std::cout << doc.dump(2) << '\n';
            return kOk;
        }

        if (*evaluate) {
            const auto manifest = prnu::parse_manifest(manifest_path);
            prnu::ProtocolConfig config;
            config.identify = identify_options(common, &manifest);
            config.averaging = averaging_or(average_flag, manifest.averaging);
            config.rates = {rate.value_or(manifest.rate)};
            if (config.rates.front() == 0) throw ConfigError("--rate must be >= 1");
            config.methods = parse_methods(methods_spec, normalize, metric);
            config.threads = common.threads;
            if (average_matrix) {
                if (config.methods.size() != 1) throw ConfigError("--average-matrix takes exactly one --method");
                const auto rows = prnu::averaging_matrix(manifest, config.methods.front(), config.rates.front(),
                                                         config.identify, config.threads);
                std::cerr << prnu::averaging_matrix_text(rows);
                emit_json(prnu::averaging_matrix_json(rows, config.methods.front(), config.rates.front()), out_path);
                return kOk;
            }
            emit_json(prnu::report_json(prnu::run_protocol(manifest, config)), out_path);
            return kOk;
        }

        if (*sweep_cmd) {
            const auto manifest = prnu::parse_manifest(manifest_path);
            prnu::ProtocolConfig config;
            config.identify = identify_options(common, &manifest);
            config.averaging = averaging_or(average_flag, manifest.averaging);
            config.rates = parse_rates(rates_spec);
            config.methods = parse_methods(methods_spec, false, "");
            config.threads = common.threads;
            const auto result = prnu::run_protocol(manifest, config);
            const auto table = prnu::sweep_table(result);
            const fs::path dir = out_dir.empty() ? fs::path(manifest_path).parent_path() / "sweep" : fs::path(out_dir);
            write_text(dir / "sweep.json", prnu::sweep_json(result, table).dump(2) + "\n");
            write_text(dir / "sweep.csv", prnu::sweep_csv(table));
            std::cout << prnu::sweep_csv(table);
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const prnu::CompatibilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const prnu::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
