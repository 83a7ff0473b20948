#include "prnu/identify.hpp"

#include "prnu/imaging.hpp"

#include <algorithm>

namespace prnu {

namespace {

bool has_spread(const Frame& m)
{
    return (m.array() != m(0, 0)).any();
}

// First index of the maximum, plus whether another entry equals it.
std::pair<std::size_t, bool> argmax_first(std::span<const double> values)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    bool tie = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != best && values[i] == values[best]) tie = true;
    }
    return {best, tie};
}

IdentificationResult make_result(const std::vector<std::string>& cameras, std::vector<double> evidence)
{
    IdentificationResult result;
    const auto [best, tie] = argmax_first(evidence);
    result.cameras = cameras;
    result.predicted_index = best;
    result.predicted = cameras.at(best);
    result.tie = tie;
    result.evidence = std::move(evidence);
    return result;
}

void check_scores(const std::vector<std::string>& cameras, std::span<const std::vector<double>> frame_scores)
{
    if (cameras.empty()) {
        throw std::invalid_argument("no cameras enrolled");
    }
    if (frame_scores.empty()) {
        throw std::invalid_argument("empty frame stream");
    }
    for (const auto& s : frame_scores) {
        if (s.size() != cameras.size()) {
            throw std::invalid_argument("score vector length does not match the registry size");
        }
    }
}

} // namespace

std::string MethodConfig::name() const
{
    switch (method) {
    case Method::voting:
        return "voting";
    case Method::pattern_correlation:
        return metric == PatternMetric::pearson ? "patcorr" : "patcorr-pce";
    case Method::pce_vectors:
        return normalize ? "pcevec-norm" : "pcevec";
    }
    return "unknown";
}

MethodConfig MethodConfig::parse(std::string_view name)
{
    if (name == "voting") return {Method::voting};
    if (name == "patcorr" || name == "patcorr-pearson") return {Method::pattern_correlation, PatternMetric::pearson};
    if (name == "patcorr-pce") return {Method::pattern_correlation, PatternMetric::pce};
    if (name == "pcevec") return {Method::pce_vectors, PatternMetric::pearson, false};
    if (name == "pcevec-norm") return {Method::pce_vectors, PatternMetric::pearson, true};
    throw std::invalid_argument("unknown method '" + std::string(name) +
                                "' (expected voting, patcorr, patcorr-pce, pcevec, pcevec-norm)");
}

std::string_view to_string(Method method)
{
    switch (method) {
    case Method::voting: return "voting";
    case Method::pattern_correlation: return "patcorr";
    case Method::pce_vectors: return "pcevec";
    }
    return "unknown";
}

std::string_view to_string(PatternMetric metric)
{
    return metric == PatternMetric::pearson ? "pearson" : "pce";
}

std::string_view to_string(TemplateMode mode)
{
    return mode == TemplateMode::modulated ? "modulated" : "raw";
}

TemplateMode parse_template_mode(std::string_view name)
{
    if (name == "modulated") return TemplateMode::modulated;
    if (name == "raw") return TemplateMode::raw;
    throw std::invalid_argument("unknown template mode '" + std::string(name) + "' (expected modulated or raw)");
}

void Registry::add(Fingerprint fp)
{
    if (fp.camera_id.empty()) {
        throw std::invalid_argument("registry: fingerprint without camera id");
    }
    if (index_of(fp.camera_id)) {
        throw std::invalid_argument("registry: duplicate camera id '" + fp.camera_id + "'");
    }
    if (!entries_.empty() && !same_shape(fp.pattern, entries_.front().pattern)) {
        throw CompatibilityError("registry: fingerprint '" + fp.camera_id + "' is " +
                                 shape_string(fp.rows(), fp.cols()) + ", registry is " + shape_string(rows(), cols()));
    }
    entries_.push_back(std::move(fp));
}

std::optional<std::size_t> Registry::index_of(std::string_view id) const
{
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].camera_id == id) return i;
    }
    return std::nullopt;
}

std::vector<std::string> Registry::ids() const
{
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.camera_id);
    return out;
}

std::vector<double> score_split(const NoiseSplit& split, const Registry& registry, const IdentifyOptions& options)
{
    if (!same_shape(split.residual, registry[0].pattern)) {
        throw CompatibilityError("frame " + shape_string(split.residual.rows(), split.residual.cols()) +
                                 " does not match registry resolution " +
                                 shape_string(registry.rows(), registry.cols()));
    }
    std::vector<double> scores(registry.size(), 0.0);
    // A residual with no spread carries no evidence for any camera.
    if (!has_spread(split.residual)) {
        return scores;
    }
    for (std::size_t c = 0; c < registry.size(); ++c) {
        const Frame& pattern = registry[c].pattern;
        Frame templ = options.template_mode == TemplateMode::modulated ? Frame(pattern.cwiseProduct(split.content))
                                                                       : pattern;
        if (has_spread(templ)) {
            scores[c] = pce(split.residual, templ, options.pce_window).pce;
        }
    }
    return scores;
}

std::vector<double> score_frame(const Frame& frame, const Registry& registry, const IdentifyOptions& options)
{
    if (registry.empty()) {
        throw std::invalid_argument("score_frame: empty registry");
    }
    if (!same_shape(frame, registry[0].pattern)) {
        throw CompatibilityError("frame " + shape_string(frame.rows(), frame.cols()) +
                                 " does not match registry resolution " +
                                 shape_string(registry.rows(), registry.cols()));
    }
    return score_split(split_noise(frame, options.denoise), registry, options);
}

IdentificationResult tally_votes(const std::vector<std::string>& cameras,
                                 std::span<const std::vector<double>> frame_scores)
{
    check_scores(cameras, frame_scores);
    std::vector<double> votes(cameras.size(), 0.0);
    for (const auto& s : frame_scores) {
        votes[argmax_first(s).first] += 1.0;
    }
    auto result = make_result(cameras, std::move(votes));
    result.method = {Method::voting};
    result.frames_used = frame_scores.size();
    return result;
}

IdentificationResult mean_pce_vector(const std::vector<std::string>& cameras,
                                     std::span<const std::vector<double>> frame_scores, bool normalize)
{
    check_scores(cameras, frame_scores);
    std::vector<double> sum(cameras.size(), 0.0);
    std::size_t used = 0;
    for (const auto& s : frame_scores) {
        double scale = 1.0;
        if (normalize) {
            const double peak = *std::max_element(s.begin(), s.end());
            if (!(peak > 0)) continue;
            scale = 1.0 / peak;
        }
        for (std::size_t i = 0; i < s.size(); ++i) sum[i] += s[i] * scale;
        ++used;
    }
    if (used == 0) {
        throw std::invalid_argument("pce vectors: every frame was skipped by normalization");
    }
    for (double& v : sum) v /= static_cast<double>(used);
    auto result = make_result(cameras, std::move(sum));
    result.method = {Method::pce_vectors, PatternMetric::pearson, normalize};
    result.frames_used = used;
    result.frames_skipped = frame_scores.size() - used;
    return result;
}

VideoIdentifier::VideoIdentifier(const Registry& registry, MethodConfig method, IdentifyOptions options)
    : registry_(&registry), method_(method), options_(std::move(options))
{
    if (registry.empty()) {
        throw std::invalid_argument("identification needs at least one enrolled camera");
    }
    if (method_.method == Method::pattern_correlation) {
        query_ = FingerprintAccumulator(registry.rows(), registry.cols());
    }
}

void VideoIdentifier::add_frame(const Frame& frame)
{
    const Frame harmonized = harmonize_resolution(frame, registry_->rows(), registry_->cols());
    const NoiseSplit split = split_noise(harmonized, options_.denoise);
    if (wants_scores()) {
        add(split, score_split(split, *registry_, options_));
    } else {
        add(split, {});
    }
}

void VideoIdentifier::add(const NoiseSplit& split, std::span<const double> scores)
{
    if (wants_scores()) {
        if (scores.size() != registry_->size()) {
            throw std::invalid_argument("VideoIdentifier: missing or malformed frame scores");
        }
        frame_scores_.emplace_back(scores.begin(), scores.end());
    } else {
        query_.add(split);
    }
    ++frames_;
}

IdentificationResult VideoIdentifier::result() const
{
    if (frames_ == 0) {
        throw std::invalid_argument("empty frame stream");
    }
    const auto cameras = registry_->ids();
    switch (method_.method) {
    case Method::voting:
        return tally_votes(cameras, frame_scores_);
    case Method::pce_vectors:
        return mean_pce_vector(cameras, frame_scores_, method_.normalize);
    case Method::pattern_correlation:
        break;
    }
    const Fingerprint query = finalize(query_, "query");
    std::vector<double> scores(registry_->size(), 0.0);
    if (has_spread(query.pattern)) {
        for (std::size_t c = 0; c < registry_->size(); ++c) {
            const Frame& stored = (*registry_)[c].pattern;
            if (!has_spread(stored)) continue;
            scores[c] = method_.metric == PatternMetric::pearson ? pearson(query.pattern, stored)
                                                                 : pce(query.pattern, stored, options_.pce_window).pce;
        }
    }
    auto result = make_result(cameras, std::move(scores));
    result.method = method_;
    result.frames_used = frames_;
    return result;
}

IdentificationResult identify(std::span<const Frame> frames, const Registry& registry, const MethodConfig& method,
                              const IdentifyOptions& options)
{
    if (frames.empty()) {
        throw std::invalid_argument("empty frame stream");
    }
    VideoIdentifier identifier(registry, method, options);
    for (const Frame& f : frames) identifier.add_frame(f);
    return identifier.result();
}

IdentificationResult identify_voting(std::span<const Frame> frames, const Registry& registry,
                                     const IdentifyOptions& options)
{
    return identify(frames, registry, {Method::voting}, options);
}

IdentificationResult identify_pattern_corr(std::span<const Frame> frames, const Registry& registry,
                                           PatternMetric metric, const IdentifyOptions& options)
{
    return identify(frames, registry, {Method::pattern_correlation, metric}, options);
}

IdentificationResult identify_pce_vectors(std::span<const Frame> frames, const Registry& registry, bool normalize,
                                          const IdentifyOptions& options)
{
    return identify(frames, registry, {Method::pce_vectors, PatternMetric::pearson, normalize}, options);
}

} // namespace prnu
