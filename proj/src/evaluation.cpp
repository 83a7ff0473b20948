#include "prnu/evaluation.hpp"

#include "prnu/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace prnu {
using nlohmann::json;

namespace {

std::size_t label_index(const std::vector<std::string>& labels, const std::string& label)
{
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return i;
    }
    throw std::invalid_argument("unknown label '" + label + "'");
}

std::string format_pct(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", round_percent(v));
    return buf;
}

// Identifies every test with every (rate, method) against per-rate registries.
std::vector<std::vector<std::vector<IdentificationResult>>>
identify_tests(const DatasetManifest& manifest, const std::vector<Registry>& registries, const ProtocolConfig& config)
{
    const auto& rates = config.rates;
    const auto& methods = config.methods;
    const std::array<Index, 2> resolution{registries.front().rows(), registries.front().cols()};
    const SamplingMode mode = config.averaging.run ? SamplingMode::average : SamplingMode::select;
    const std::size_t n_tests = manifest.tests.size();

    // per_test[test][rate][method]
    std::vector<std::vector<std::vector<IdentificationResult>>> per_test(n_tests);
    parallel_for(n_tests, config.threads, [&](std::size_t t) {
        const TestEntry& test = manifest.tests[t];
        const FrameSequence video(test.video, resolution);
        std::vector<SamplingPlan> plans;
        for (std::size_t rate : rates) {
            plans.push_back(plan_sampling(video.size(), rate, mode));
            if (plans.back().groups.empty()) {
                throw InputError("test video " + test.name + " is shorter than one averaging block at rate 1/" +
                                 std::to_string(rate));
            }
        }
        std::vector<std::vector<VideoIdentifier>> identifiers(rates.size());
        for (std::size_t r = 0; r < rates.size(); ++r) {
            for (const auto& m : methods) identifiers[r].emplace_back(registries[r], m, config.identify);
        }
        for_each_sample(video, plans, config.identify.denoise, [&](std::size_t r, const NoiseSplit& split) {
            std::vector<double> scores;
            bool scored = false;
            for (auto& id : identifiers[r]) {
                if (id.wants_scores() && !scored) {
                    scores = score_split(split, registries[r], config.identify);
                    scored = true;
                }
                id.add(split, scores);
            }
        });
        per_test[t].resize(rates.size());
        for (std::size_t r = 0; r < rates.size(); ++r) {
            for (const auto& id : identifiers[r]) per_test[t][r].push_back(id.result());
        }
    });

    std::vector<std::vector<std::vector<IdentificationResult>>> results(
        rates.size(), std::vector<std::vector<IdentificationResult>>(methods.size()));
    for (std::size_t t = 0; t < n_tests; ++t) {
        for (std::size_t r = 0; r < rates.size(); ++r) {
            for (std::size_t m = 0; m < methods.size(); ++m) results[r][m].push_back(std::move(per_test[t][r][m]));
        }
    }
    return results;
}

void check_protocol_inputs(const DatasetManifest& manifest, const ProtocolConfig& config)
{
    if (config.rates.empty()) throw std::invalid_argument("no sampling rates configured");
    if (config.methods.empty()) throw std::invalid_argument("no identification methods configured");
    if (manifest.tests.empty()) throw InputError("manifest has no test videos");
    for (const auto& t : manifest.tests) {
        if (!t.truth) throw InputError("test '" + t.name + "' has no truth label; evaluation needs one for every test");
    }
}

} // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), counts_(Counts::Zero(labels_.size(), labels_.size()))
{
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted)
{
    if (truth >= labels_.size() || predicted >= labels_.size()) {
        throw std::out_of_range("confusion matrix label index out of range");
    }
    ++counts_(truth, predicted);
}

ConfusionMatrix confusion_matrix(const std::vector<std::string>& labels, const std::vector<std::string>& truths,
                                 const std::vector<std::string>& predictions)
{
    if (truths.size() != predictions.size()) {
        throw std::invalid_argument("confusion matrix: " + std::to_string(truths.size()) + " truths vs " +
                                    std::to_string(predictions.size()) + " predictions");
    }
    if (truths.empty()) {
        throw std::invalid_argument("no test samples");
    }
    ConfusionMatrix cm(labels);
    for (std::size_t i = 0; i < truths.size(); ++i) {
        cm.add(label_index(labels, truths[i]), label_index(labels, predictions[i]));
    }
    return cm;
}

double success_rate(const ConfusionMatrix& cm)
{
    if (cm.total() <= 0) {
        throw std::invalid_argument("success rate of an empty confusion matrix");
    }
    return static_cast<double>(cm.correct()) / static_cast<double>(cm.total()) * 100.0;
}

double error_rate(const ConfusionMatrix& cm)
{
    return 100.0 - success_rate(cm);
}

double round_percent(double value)
{
    return std::round(value * 100.0) / 100.0;
}

ConfusionMatrix ProtocolResult::confusion(std::size_t rate_index, std::size_t method_index,
                                          const std::string* variant) const
{
    std::vector<std::string> truths, predictions;
    const auto& row = results.at(rate_index).at(method_index);
    for (std::size_t t = 0; t < tests.size(); ++t) {
        if (variant && tests[t].variant != *variant) continue;
        truths.push_back(*tests[t].truth);
        predictions.push_back(row[t].predicted);
    }
    return confusion_matrix(labels, truths, predictions);
}

std::vector<std::string> ProtocolResult::variants() const
{
    std::vector<std::string> out;
    for (const auto& t : tests) {
        if (std::find(out.begin(), out.end(), t.variant) == out.end()) out.push_back(t.variant);
    }
    return out;
}

ProtocolResult run_protocol(const DatasetManifest& manifest, const ProtocolConfig& config)
{
    check_protocol_inputs(manifest, config);
    ProtocolResult result;
    result.labels = manifest.camera_ids();
    result.config = config;
    result.seed = manifest.seed;
    result.tests = manifest.tests;
    const auto registries =
        enroll_rates(manifest, config.rates, config.averaging.train, config.identify.denoise, config.threads);
    result.results = identify_tests(manifest, registries, config);
    return result;
}

SweepTable sweep_table(const ProtocolResult& result)
{
    SweepTable table;
    const auto variants = result.variants();
    const auto& methods = result.config.methods;
    std::vector<double> method_sum(methods.size(), 0.0);
    for (std::size_t r = 0; r < result.config.rates.size(); ++r) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            double sum = 0;
            for (const auto& v : variants) {
                const double q = error_rate(result.confusion(r, m, &v));
                table.rows.push_back({result.config.rates[r], methods[m].name(), v, q});
                sum += q;
            }
            const double mean = sum / static_cast<double>(variants.size());
            if (variants.size() > 1) table.rows.push_back({result.config.rates[r], methods[m].name(), "mean", mean});
            method_sum[m] += mean;
        }
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
        table.method_means.emplace_back(methods[m].name(), method_sum[m] / static_cast<double>(result.config.rates.size()));
    }
    return table;
}

SweepTable sweep(const DatasetManifest& manifest, const ProtocolConfig& config)
{
    return sweep_table(run_protocol(manifest, config));
}

json confusion_to_json(const ConfusionMatrix& cm)
{
    json counts = json::array();
    for (Index i = 0; i < cm.counts().rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < cm.counts().cols(); ++j) row.push_back(cm.counts()(i, j));
        counts.push_back(std::move(row));
    }
    const double q = round_percent(error_rate(cm));
    // p is derived from the rounded q so that the reported pair sums to 100.
    return {{"labels", cm.labels()}, {"counts", counts}, {"total", cm.total()}, {"correct", cm.correct()},
            {"success_pct", round_percent(100.0 - q)}, {"error_pct", q}};
}

json report_json(const ProtocolResult& result)
{
    const auto& cfg = result.config;
    json methods = json::array();
    for (const auto& m : cfg.methods) methods.push_back(m.name());
    json doc;
    doc["config"] = {{"rates", cfg.rates},
                     {"methods", methods},
                     {"average", {{"train", cfg.averaging.train}, {"run", cfg.averaging.run}}},
                     {"sigma0", cfg.identify.denoise.sigma0},
                     {"levels", cfg.identify.denoise.levels},
                     {"wavelet", cfg.identify.denoise.wavelet.name()},
                     {"template", to_string(cfg.identify.template_mode)},
                     {"pce_window", cfg.identify.pce_window},
                     {"seed", result.seed}};
    doc["labels"] = result.labels;
    json runs = json::array();
    for (std::size_t r = 0; r < cfg.rates.size(); ++r) {
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            json run;
            run["rate"] = cfg.rates[r];
            run["method"] = cfg.methods[m].name();
            run["confusion_matrix"] = confusion_to_json(result.confusion(r, m));
            json predictions = json::array();
            for (std::size_t t = 0; t < result.tests.size(); ++t) {
                const auto& id = result.results[r][m][t];
                predictions.push_back({{"test", result.tests[t].name},
                                       {"variant", result.tests[t].variant},
                                       {"truth", *result.tests[t].truth},
                                       {"predicted", id.predicted},
                                       {"tie", id.tie},
                                       {"frames_used", id.frames_used},
                                       {"evidence", id.evidence}});
            }
            run["predictions"] = std::move(predictions);
            runs.push_back(std::move(run));
        }
    }
    doc["runs"] = std::move(runs);
    return doc;
}

json sweep_json(const ProtocolResult& result, const SweepTable& table)
{
    json doc = report_json(result);
    json rows = json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"rate", row.rate}, {"method", row.method}, {"test", row.test},
                        {"error_pct", round_percent(row.error_pct)}});
    }
    json means = json::array();
    for (const auto& [name, mean] : table.method_means) {
        means.push_back({{"method", name}, {"mean_error_pct", round_percent(mean)}});
    }
    doc["sweep"] = {{"rows", rows}, {"method_means", means}};
    return doc;
}

std::string sweep_csv(const SweepTable& table)
{
    std::ostringstream out;
    out << "rate,method,test,error_pct\n";
    for (const auto& row : table.rows) {
        out << row.rate << ',' << row.method << ',' << row.test << ',' << format_pct(row.error_pct) << '\n';
    }
    return out.str();
}

std::vector<AveragingRow> averaging_matrix(const DatasetManifest& manifest, const MethodConfig& method,
                                           std::size_t rate, const IdentifyOptions& options, unsigned threads)
{
    ProtocolConfig config;
    config.rates = {rate};
    config.methods = {method};
    config.identify = options;
    config.threads = threads;
    check_protocol_inputs(manifest, config);

    const std::size_t rates[] = {rate};
    const auto plain = enroll_rates(manifest, rates, false, options.denoise, threads);
    const auto averaged = enroll_rates(manifest, rates, true, options.denoise, threads);

    std::vector<AveragingRow> rows;
    for (const AveragingConfig avg : {AveragingConfig{false, false}, AveragingConfig{true, false},
                                      AveragingConfig{false, true}, AveragingConfig{true, true}}) {
        config.averaging = avg;
        ProtocolResult result;
        result.labels = manifest.camera_ids();
        result.config = config;
        result.tests = manifest.tests;
        result.results = identify_tests(manifest, avg.train ? averaged : plain, config);
        ConfusionMatrix cm = result.confusion(0, 0);
        const double q = error_rate(cm);
        rows.push_back({avg, std::move(cm), q});
    }
    return rows;
}

json averaging_matrix_json(const std::vector<AveragingRow>& rows, const MethodConfig& method, std::size_t rate)
{
    json out = json::array();
    for (const auto& row : rows) {
        out.push_back({{"average_train", row.averaging.train ? "YES" : "NO"},
                       {"average_run", row.averaging.run ? "YES" : "NO"},
                       {"error_pct", round_percent(row.error_pct)},
                       {"confusion_matrix", confusion_to_json(row.confusion)}});
    }
    return {{"method", method.name()}, {"rate", rate}, {"rows", out}};
}

std::string averaging_matrix_text(const std::vector<AveragingRow>& rows)
{
    std::ostringstream out;
    out << "Average in training phase\tAverage in running phase\tError (%)\n";
    for (const auto& row : rows) {
        out << (row.averaging.train ? "YES" : "NO") << '\t' << (row.averaging.run ? "YES" : "NO") << '\t'
            << format_pct(row.error_pct) << '\n';
    }
    return out.str();
}

} // namespace prnu
