#include "prnu/fingerprint.hpp"
#include "prnu/imaging.hpp"
#include "prnu/synthcam.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <fstream>

using namespace prnu;

namespace {

double corr(const Frame& a, const Frame& b)
{
    const Eigen::ArrayXXd x = a.array() - a.mean(), y = b.array() - b.mean();
    return (x * y).sum() / std::sqrt((x * x).sum() * (y * y).sum());
}

} // namespace

TEST_CASE("make_camera")
{
    const auto a = make_camera("A", 5, 128, 128, 0.02);
    const auto b = make_camera("A", 5, 128, 128, 0.02);
    CHECK(a.prnu == b.prnu);
    CHECK(std::abs(a.prnu.mean()) < 1e-3);
    const double sd = std::sqrt(a.prnu.array().square().mean());
    CHECK(sd >= 0.019);
    CHECK(sd <= 0.021);
    for (std::uint64_t s = 6; s < 16; ++s) CHECK(std::abs(corr(a.prnu, make_camera("B", s, 128, 128).prnu)) < 0.05);

    CHECK_THROWS_AS(make_camera("x", 1, 128, 128, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_camera("x", 1, 128, 128, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(make_camera("x", 1, 15, 128), std::invalid_argument);
}

TEST_CASE("capture follows the multiplicative model")
{
    SyntheticCamera zero = make_camera("Z", 1, 32, 32);
    zero.prnu.setZero();
    const Frame scene = test::random_frame(2, 32, 32, 128, 30).cwiseMax(0.0).cwiseMin(255.0);
    CHECK(capture(zero, scene, 0.0) == scene);

    SyntheticCamera cam = make_camera("A", 3, 32, 32);
    const Frame out = capture(cam, scenes::flat(32, 32, 128.0), 0.0);
    CHECK(((out.array() / 128.0 - 1.0) - cam.prnu.array()).abs().maxCoeff() < 1e-12);

    SUBCASE("linear in the scene for a fixed noise draw")
    {
        SyntheticCamera c1 = make_camera("A", 4, 32, 32), c2 = c1;
        const Frame s = scenes::texture(32, 32, 9, 60.0, 20.0);
        const Frame o1 = capture(c1, s, 1.0);
        const Frame o2 = capture(c2, (2.0 * s).eval(), 1.0);
        const Frame noise = o1 - ((1.0 + c1.prnu.array()) * s.array()).matrix();
        CHECK(((o2 - noise).array() - 2.0 * (1.0 + c1.prnu.array()) * s.array()).abs().maxCoeff() < 1e-9);
    }

    CHECK_THROWS_AS(capture(cam, Frame::Zero(16, 32), 0.0), std::invalid_argument);
}

TEST_CASE("scene generators stay inside the non-clipping band")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (std::size_t t = 0; t < 100; t += 7) {
            const Frame tr = scenes::training_frame(64, 64, seed, t, 100);
            const Frame te = scenes::test_frame(64, 64, seed, t);
            CHECK(tr.minCoeff() >= scenes::kLow);
            CHECK(tr.maxCoeff() <= scenes::kHigh);
            CHECK(te.minCoeff() >= scenes::kLow);
            CHECK(te.maxCoeff() <= scenes::kHigh);
        }
    }
    const Frame g = scenes::gradient(16, 32, 40.0, 200.0, 0.0);
    CHECK(g.minCoeff() == doctest::Approx(40.0));
    CHECK(g.maxCoeff() == doctest::Approx(200.0));
}

TEST_CASE("no clipping for in-band scenes at moderate noise")
{
    SyntheticCamera cam = make_camera("A", 11, 128, 128, 0.02);
    for (std::size_t t = 0; t < 30; ++t) {
        for (const Frame& scene : {scenes::training_frame(128, 128, 3, t, 30), scenes::test_frame(128, 128, 4, t)}) {
            const Frame out = capture(cam, scene, 5.0);
            REQUIRE(out.minCoeff() > 0.0);
            REQUIRE(out.maxCoeff() < 255.0);
        }
    }
}

TEST_CASE("mixed enrollment recovers the pattern")
{
    SyntheticCamera cam = make_camera("A", 17, 96, 96, 0.02);
    FingerprintAccumulator acc(96, 96);
    for (std::size_t t = 0; t < 200; ++t) acc.add(capture(cam, scenes::training_frame(96, 96, 1, t, 200), 2.0));
    CHECK(corr(finalize(acc).pattern, cam.prnu) > 0.95);
}

TEST_CASE("write_synthetic_dataset layout and reproducibility")
{
    test::TempDir a("synth_a"), b("synth_b");
    SynthOptions o;
    o.cameras = 2;
    o.train_frames = 4;
    o.test_videos = 2;
    o.test_frames = 3;
    o.rows = 32;
    o.cols = 40;
    const auto m = write_synthetic_dataset(a.path(), o);
    write_synthetic_dataset(b.path(), o, 2);

    CHECK(m.cameras.size() == 2);
    CHECK(m.tests.size() == 4);
    CHECK(*m.tests[2].truth == "cam01");
    CHECK(list_frames(a / "cam00/train").size() == 4);
    CHECK(list_frames(a / "cam01/test_01").size() == 3);
    CHECK(std::filesystem::exists(a / "manifest.json"));
    CHECK(read_fingerprint(a / "truth/cam00.prnufp").rows() == 32);

    const auto reparsed = parse_manifest(a / "manifest.json");
    CHECK(reparsed.camera_ids() == m.camera_ids());
    CHECK((*reparsed.resolution)[1] == 40);

    for (const char* rel : {"cam00/train/frame_000003.png", "cam01/test_00/frame_000002.png", "truth/cam01.prnufp"}) {
        std::ifstream fa(a / rel, std::ios::binary), fb(b / rel, std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
        CHECK(!sa.empty());
        CHECK(sa == sb);
    }
}
