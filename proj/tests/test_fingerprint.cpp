#include "prnu/fingerprint.hpp"
#include "prnu/synthcam.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace prnu;

namespace {

std::vector<Frame> textured_frames(std::size_t count, std::uint64_t seed, Index n = 48)
{
    std::vector<Frame> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(test::random_frame(seed + i, n, n, 128, 25));
    return out;
}

double corr(const Frame& a, const Frame& b)
{
    const Eigen::ArrayXXd x = a.array() - a.mean();
    const Eigen::ArrayXXd y = b.array() - b.mean();
    return (x * y).sum() / std::sqrt((x * x).sum() * (y * y).sum());
}

Fingerprint enroll_flat(const SyntheticCamera& cam_in, std::size_t frames, double value, double sigma)
{
    SyntheticCamera cam = cam_in;
    FingerprintAccumulator acc(cam.rows(), cam.cols());
    const Frame scene = scenes::flat(cam.rows(), cam.cols(), value);
    for (std::size_t i = 0; i < frames; ++i) acc.add(capture(cam, scene, sigma));
    return finalize(acc, cam.id);
}

} // namespace

TEST_CASE("accumulating a constant frame")
{
    FingerprintAccumulator acc(32, 32);
    acc.add(Frame::Constant(32, 32, 60.0));
    CHECK(acc.numerator().cwiseAbs().maxCoeff() < 1e-6 * 60.0);
    CHECK(acc.denominator().minCoeff() == doctest::Approx(3600.0).epsilon(1e-9));
    CHECK(acc.frame_count() == 1);
}

TEST_CASE("single-frame fingerprint is W * I / I^2")
{
    const Frame f = textured_frames(1, 3).front();
    const NoiseSplit s = split_noise(f);
    const Fingerprint fp = finalize(accumulate({48, 48}, f));
    const Frame want = (s.residual.array() / s.content.array()).matrix();
    CHECK(test::relative_error(fp.pattern, want) < 1e-12);
    CHECK(fp.frame_count == 1);

    SUBCASE("repetition cancels")
    {
        FingerprintAccumulator acc(48, 48);
        for (int i = 0; i < 7; ++i) acc.add(s);
        CHECK(test::relative_error(finalize(acc).pattern, fp.pattern) < 1e-12);
    }
}

TEST_CASE("merge is an element-wise sum")
{
    const auto frames = textured_frames(6, 40);
    FingerprintAccumulator seq(48, 48), first(48, 48), second(48, 48), empty(48, 48);
    for (std::size_t i = 0; i < 6; ++i) {
        seq.add(frames[i]);
        (i < 3 ? first : second).add(frames[i]);
    }
    const auto ab = merge(first, second);
    const auto ba = merge(second, first);
    CHECK(ab.numerator() == ba.numerator());
    CHECK(ab.denominator() == ba.denominator());
    CHECK(ab.frame_count() == 6);
    CHECK(test::relative_error(ab.numerator(), seq.numerator()) < 1e-10);
    CHECK(test::relative_error(ab.denominator(), seq.denominator()) < 1e-10);
    CHECK(test::relative_error(finalize(ab).pattern, finalize(seq).pattern) < 1e-10);

    const auto same = merge(seq, empty);
    CHECK(same.numerator() == seq.numerator());
    CHECK(same.frame_count() == seq.frame_count());

    FingerprintAccumulator other(40, 48);
    CHECK_THROWS_AS(seq.merge(other), std::invalid_argument);
    CHECK_THROWS_AS(seq.add(Frame::Zero(48, 40)), std::invalid_argument);
}

TEST_CASE("finalize guards")
{
    CHECK_THROWS_AS(finalize(FingerprintAccumulator(16, 16)), std::invalid_argument);

    FingerprintAccumulator zeros(16, 16);
    zeros.add(Frame::Zero(16, 16));
    const Fingerprint fp = finalize(zeros);
    CHECK(fp.pattern.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fp.pattern.allFinite());

    // A dead column: zero content there, so a zero denominator and F = 0.
    NoiseSplit split = split_noise(test::random_frame(8, 32, 32, 128, 30));
    split.content.col(5).setZero();
    FingerprintAccumulator acc(32, 32);
    acc.add(split);
    acc.add(split);
    const Fingerprint guarded = finalize(acc);
    CHECK(guarded.pattern.allFinite());
    CHECK(guarded.pattern.col(5).cwiseAbs().maxCoeff() == 0.0);
    CHECK(guarded.pattern.col(4).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("flat-field enrollment recovers the synthetic PRNU")
{
    const SyntheticCamera cam = make_camera("A", 123, 96, 96, 0.02);
    const Fingerprint fp = enroll_flat(cam, 200, 128.0, 2.0);
    const double std_k = std::sqrt((cam.prnu.array() - cam.prnu.mean()).square().mean());
    CHECK(corr(fp.pattern, cam.prnu) > 0.95);
    // Per-pixel error is small against the pattern amplitude.
    CHECK(std::sqrt((fp.pattern - cam.prnu).array().square().mean()) < 0.1 * std_k);
}

TEST_CASE("a max-error bound of 0.1 std(K) is below the sampling noise floor")
{
    // An ideal estimator that knows the flat scene, (out - 128) / 128 averaged
    // over 200 frames, has per-pixel error std 2 / (128 sqrt(200)), about
    // 0.055 std(K); the maximum over 9216 pixels is near 4 of those.
    SyntheticCamera cam = make_camera("A", 123, 96, 96, 0.02);
    const double std_k = std::sqrt((cam.prnu.array() - cam.prnu.mean()).square().mean());
    Frame ideal = Frame::Zero(96, 96);
    for (int i = 0; i < 200; ++i) ideal += (capture(cam, scenes::flat(96, 96, 128.0), 2.0).array() / 128.0 - 1.0).matrix();
    ideal /= 200.0;
    const double ideal_max = (ideal - cam.prnu).cwiseAbs().maxCoeff();
    CHECK(ideal_max > 0.1 * std_k);
    const Fingerprint fp = enroll_flat(make_camera("A", 123, 96, 96, 0.02), 200, 128.0, 2.0);
    CHECK((fp.pattern - cam.prnu).cwiseAbs().maxCoeff() < 2.0 * ideal_max);
}

TEST_CASE("fingerprint quality grows with the frame count")
{
    const SyntheticCamera cam = make_camera("A", 9, 64, 64, 0.02);
    double last = -1.0;
    for (std::size_t n : {10, 50, 200}) {
        const double c = corr(enroll_flat(cam, n, 128.0, 4.0).pattern, cam.prnu);
        CHECK(c >= last - 0.01);
        last = c;
    }
    CHECK(last > 0.9);
}

TEST_CASE("binary format")
{
    Fingerprint fp{"cam-7", test::random_frame(1, 17, 19, 0, 0.02), 42};
    std::stringstream buf;
    write_fingerprint(buf, fp);
    const std::string bytes = buf.str();
    REQUIRE(bytes.size() == 8 + 16 + 5 + 17 * 19 * 4);
    CHECK(bytes.substr(0, 8) == "PRNUFP01");
    CHECK(static_cast<unsigned char>(bytes[8]) == 17);
    CHECK(static_cast<unsigned char>(bytes[12]) == 19);
    CHECK(static_cast<unsigned char>(bytes[16]) == 42);
    CHECK(static_cast<unsigned char>(bytes[20]) == 5);
    CHECK(bytes.substr(24, 5) == "cam-7");

    const float first = static_cast<float>(fp.pattern(0, 0));
    std::uint32_t u = std::bit_cast<std::uint32_t>(first);
    for (int b = 0; b < 4; ++b) CHECK(static_cast<unsigned char>(bytes[29 + b]) == ((u >> (8 * b)) & 0xff));

    std::stringstream in(bytes);
    const Fingerprint back = read_fingerprint(in);
    CHECK(back.camera_id == "cam-7");
    CHECK(back.frame_count == 42);
    CHECK(back.pattern == fp.pattern.cast<float>().cast<double>());

    std::stringstream bad_magic("PRNUFP02" + bytes.substr(8));
    CHECK_THROWS(read_fingerprint(bad_magic));
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS(read_fingerprint(truncated));
}
