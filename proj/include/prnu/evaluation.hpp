#ifndef PRNU_EVALUATION_HPP
#define PRNU_EVALUATION_HPP

#include "prnu/identify.hpp"
#include "prnu/manifest.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace prnu {

/// counts(i, j): number of class-i test samples identified as class j.
class ConfusionMatrix {
public:
    using Counts = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    explicit ConfusionMatrix(std::vector<std::string> labels);

    void add(std::size_t truth, std::size_t predicted);

    const std::vector<std::string>& labels() const { return labels_; }
    const Counts& counts() const { return counts_; }
    long long total() const { return counts_.sum(); }
    long long correct() const { return counts_.trace(); }

private:
    std::vector<std::string> labels_;
    Counts counts_;
};

/// Rows and columns follow the order of `labels`.
ConfusionMatrix confusion_matrix(const std::vector<std::string>& labels, const std::vector<std::string>& truths,
                                 const std::vector<std::string>& predictions);

/// p = 100 * trace / total.
double success_rate(const ConfusionMatrix& cm);
/// q = 100 - p.
double error_rate(const ConfusionMatrix& cm);

/// Rounds a percentage to two decimals for reporting.
double round_percent(double value);

struct ProtocolConfig {
    std::vector<std::size_t> rates{10};
    std::vector<MethodConfig> methods{MethodConfig{}};
    AveragingConfig averaging;
    IdentifyOptions identify;
    unsigned threads = 1;
};

struct ProtocolResult {
    std::vector<std::string> labels;
    ProtocolConfig config;
    std::uint64_t seed = 0;
    std::vector<TestEntry> tests;
    /// results[rate][method][test]
    std::vector<std::vector<std::vector<IdentificationResult>>> results;

    /// Confusion matrix over all tests, or only over tests of one variant.
    ConfusionMatrix confusion(std::size_t rate_index, std::size_t method_index, const std::string* variant = nullptr) const;
    /// Test variants in order of first appearance.
    std::vector<std::string> variants() const;
};

/// Enrolls every camera at every rate, then identifies every test video with
/// every method. Each training and test frame is denoised once per sampling
/// mode regardless of how many rates select it. Output does not depend on the
/// thread count.
ProtocolResult run_protocol(const DatasetManifest& manifest, const ProtocolConfig& config);

struct SweepRow {
    std::size_t rate = 0;
    std::string method;
    std::string test; // variant name, or "mean" for the mean across variants
    double error_pct = 0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    /// Mean error per method over all rates (of the per-rate variant means).
    std::vector<std::pair<std::string, double>> method_means;
};

SweepTable sweep_table(const ProtocolResult& result);
SweepTable sweep(const DatasetManifest& manifest, const ProtocolConfig& config);

nlohmann::json confusion_to_json(const ConfusionMatrix& cm);
nlohmann::json report_json(const ProtocolResult& result);
nlohmann::json sweep_json(const ProtocolResult& result, const SweepTable& table);
/// Flat "rate,method,test,error_pct" table for plotting error-vs-rate curves.
std::string sweep_csv(const SweepTable& table);

struct AveragingRow {
    AveragingConfig averaging;
    ConfusionMatrix confusion;
    double error_pct = 0;
};

/// Runs all four train/run averaging combinations in the order
/// (no, no), (yes, no), (no, yes), (yes, yes).
std::vector<AveragingRow> averaging_matrix(const DatasetManifest& manifest, const MethodConfig& method,
                                           std::size_t rate, const IdentifyOptions& options = {},
                                           unsigned threads = 1);
nlohmann::json averaging_matrix_json(const std::vector<AveragingRow>& rows, const MethodConfig& method,
                                     std::size_t rate);
/// Tab-separated table with YES/NO columns for the two phases and the error.
std::string averaging_matrix_text(const std::vector<AveragingRow>& rows);

} // namespace prnu

#endif // PRNU_EVALUATION_HPP
