#ifndef PRNU_IDENTIFY_HPP
#define PRNU_IDENTIFY_HPP

#include "prnu/correlation.hpp"
#include "prnu/denoise.hpp"
#include "prnu/fingerprint.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prnu {

enum class Method {
    voting,              // per-frame max-PCE decision, simple majority
    pattern_correlation, // query fingerprint compared with each stored one
    pce_vectors,         // per-frame PCE vectors averaged, then argmax
};

enum class PatternMetric { pearson, pce };

/// What the frame residual is correlated against when scoring a frame.
enum class TemplateMode {
    modulated, // F_c * I_f, the fingerprint modulated by the frame content
    raw,       // F_c alone
};

struct MethodConfig {
    Method method = Method::voting;
    PatternMetric metric = PatternMetric::pearson; // pattern_correlation only
    bool normalize = false;                        // pce_vectors only

    /// Short name used in reports: voting, patcorr, patcorr-pce, pcevec, pcevec-norm.
    std::string name() const;
    static MethodConfig parse(std::string_view name);

    bool operator==(const MethodConfig&) const = default;
};

std::string_view to_string(Method method);
std::string_view to_string(PatternMetric metric);
std::string_view to_string(TemplateMode mode);
TemplateMode parse_template_mode(std::string_view name);

struct IdentifyOptions {
    DenoiseParams denoise;
    TemplateMode template_mode = TemplateMode::modulated;
    int pce_window = kPceExclusionWindow;
};

/// Enrolled fingerprints in enrollment order, all at one resolution.
class Registry {
public:
    void add(Fingerprint fp);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    Index rows() const { return entries_.empty() ? 0 : entries_.front().rows(); }
    Index cols() const { return entries_.empty() ? 0 : entries_.front().cols(); }
    const Fingerprint& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<Fingerprint>& entries() const { return entries_; }
    std::optional<std::size_t> index_of(std::string_view id) const;
    std::vector<std::string> ids() const;

private:
    std::vector<Fingerprint> entries_;
};

struct IdentificationResult {
    std::string predicted;
    std::size_t predicted_index = 0;
    MethodConfig method;
    std::vector<std::string> cameras;
    /// Vote tally, pattern scores, or mean PCE vector, one entry per camera.
    std::vector<double> evidence;
    std::size_t frames_used = 0;
    std::size_t frames_skipped = 0; // normalised PCE vectors with a non-positive maximum
    bool tie = false;               // the winner was chosen by enrollment order
};

/// PCE of the frame residual against every enrolled camera's template.
std::vector<double> score_split(const NoiseSplit& split, const Registry& registry, const IdentifyOptions& options = {});
std::vector<double> score_frame(const Frame& frame, const Registry& registry, const IdentifyOptions& options = {});

/// Simple-majority vote over per-frame argmax decisions; ties go to the
/// earliest enrolled camera and are flagged.
IdentificationResult tally_votes(const std::vector<std::string>& cameras,
                                 std::span<const std::vector<double>> frame_scores);

/// Mean of per-frame PCE vectors; with `normalize`, each vector is divided by
/// its own maximum first and vectors with a non-positive maximum are skipped.
IdentificationResult mean_pce_vector(const std::vector<std::string>& cameras,
                                     std::span<const std::vector<double>> frame_scores, bool normalize);

/// Incremental identification of one video. Frames (or their precomputed
/// residual splits and scores) are fed in sampling order.
class VideoIdentifier {
public:
    VideoIdentifier(const Registry& registry, MethodConfig method, IdentifyOptions options = {});

    bool wants_scores() const { return method_.method != Method::pattern_correlation; }

    /// Harmonises the frame to the registry resolution, denoises and adds it.
    void add_frame(const Frame& frame);
    /// `scores` must be score_split(split) when wants_scores(); it is ignored otherwise.
    void add(const NoiseSplit& split, std::span<const double> scores);

    std::size_t frames() const { return frames_; }
    IdentificationResult result() const;

private:
    const Registry* registry_;
    MethodConfig method_;
    IdentifyOptions options_;
    std::size_t frames_ = 0;
    std::vector<std::vector<double>> frame_scores_;
    FingerprintAccumulator query_;
};

IdentificationResult identify(std::span<const Frame> frames, const Registry& registry, const MethodConfig& method,
                              const IdentifyOptions& options = {});
IdentificationResult identify_voting(std::span<const Frame> frames, const Registry& registry,
                                     const IdentifyOptions& options = {});
IdentificationResult identify_pattern_corr(std::span<const Frame> frames, const Registry& registry,
                                           PatternMetric metric = PatternMetric::pearson,
                                           const IdentifyOptions& options = {});
IdentificationResult identify_pce_vectors(std::span<const Frame> frames, const Registry& registry,
                                          bool normalize = false, const IdentifyOptions& options = {});

} // namespace prnu

#endif // PRNU_IDENTIFY_HPP
