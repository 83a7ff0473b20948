#include "prnu/denoise.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace prnu;
namespace oracle = prnu::test::oracle;

TEST_CASE("dwt2 of a constant frame has zero details and a constant approximation")
{
    const auto p = dwt2(Frame::Constant(32, 48, 77.0), 4);
    for (const auto& lvl : p.details) {
        CHECK(lvl.horizontal.cwiseAbs().maxCoeff() < 1e-10);
        CHECK(lvl.vertical.cwiseAbs().maxCoeff() < 1e-10);
        CHECK(lvl.diagonal.cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK((p.approximation.array() - p.approximation(0, 0)).abs().maxCoeff() < 1e-10);
    // DC gain of the orthogonal lowpass is sqrt(2) per axis per level.
    CHECK(p.approximation(0, 0) == doctest::Approx(77.0 * 16.0).epsilon(1e-12));
}

TEST_CASE("dwt2 subband shapes follow the padded size")
{
    const auto p = dwt2(test::random_frame(1, 37, 50), 4);
    CHECK(p.padded_rows() == 48);
    CHECK(p.padded_cols() == 64);
    for (int k = 0; k < 4; ++k) {
        CHECK(p.details[k].horizontal.rows() == 48 >> (k + 1));
        CHECK(p.details[k].diagonal.cols() == 64 >> (k + 1));
    }
    CHECK(p.rows == 37);
    CHECK(p.cols == 50);
    CHECK_THROWS_AS(dwt2(Frame::Zero(15, 40), 4), std::invalid_argument);
    CHECK_THROWS_AS(dwt2(Frame::Zero(16, 16), 0), std::invalid_argument);
}

TEST_CASE("impulse response matches a direct convolution oracle")
{
    Frame impulse = Frame::Zero(16, 16);
    impulse(0, 0) = 1.0;
    const auto p = dwt2(impulse, 4);

    Eigen::MatrixXd approx = impulse;
    for (int k = 0; k < 4; ++k) {
        Eigen::MatrixXd next;
        const auto want = oracle::dwt_level_direct(approx, next);
        CHECK((p.details[k].horizontal - want.horizontal).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((p.details[k].vertical - want.vertical).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((p.details[k].diagonal - want.diagonal).cwiseAbs().maxCoeff() < 1e-14);
        approx = next;
    }
    CHECK((p.approximation - approx).cwiseAbs().maxCoeff() < 1e-14);

    // Frozen from tests/oracle/frozen_values.py (explicit analysis matrices).
    CHECK(p.details[0].horizontal(0, 0) == doctest::Approx(-0.0024414062499830322).epsilon(1e-12));
    CHECK(p.details[0].horizontal(7, 0) == doctest::Approx(0.007105170106798124).epsilon(1e-12));
    CHECK(p.details[0].horizontal(0, 7) == doctest::Approx(-0.006685696976177494).epsilon(1e-12));
    CHECK(p.details[0].horizontal(6, 5) == doctest::Approx(-0.0009201906162248405).epsilon(1e-12));
    CHECK(p.details[0].vertical(0, 7) == doctest::Approx(0.007105170106798124).epsilon(1e-12));
    CHECK(p.details[0].diagonal(7, 7) == doctest::Approx(0.0009511908335531467).epsilon(1e-12));
    CHECK(p.approximation(0, 0) == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(p.details[3].diagonal(0, 0) == doctest::Approx(0.12882945945254873).epsilon(1e-12));
}

TEST_CASE("idwt2 inverts dwt2 and handles degenerate pyramids")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Frame f = test::random_frame(seed, 29 + seed, 41, 100, 40);
        const auto p = dwt2(f, 4);
        CHECK(test::relative_error(idwt2(p), f) < 1e-10);
    }

    auto p = dwt2(Frame::Zero(32, 32), 4);
    CHECK(idwt2(p).cwiseAbs().maxCoeff() == 0.0);

    p.approximation.setConstant(16.0 * 3.0);
    const Frame flat = idwt2(p);
    CHECK((flat.array() - 3.0).abs().maxCoeff() < 1e-12);

    auto broken = dwt2(Frame::Zero(32, 32), 4);
    broken.details[1].vertical.resize(3, 3);
    CHECK_THROWS_AS(idwt2(broken), std::invalid_argument);
}

TEST_CASE("energy is preserved on the padded frame")
{
    const Frame f = test::random_frame(21, 64, 64, 0, 10);
    const auto p = dwt2(f, 4);
    double energy = p.approximation.squaredNorm();
    for (const auto& lvl : p.details) {
        energy += lvl.horizontal.squaredNorm() + lvl.vertical.squaredNorm() + lvl.diagonal.squaredNorm();
    }
    CHECK(energy == doctest::Approx(f.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("templated transform runs in single precision")
{
    const Image<float> f = test::random_frame(5, 32, 32).cast<float>();
    const auto p = dwt2(f, 3);
    const Image<float> back = idwt2(p);
    CHECK((back - f).norm() / f.norm() < 1e-5f);
}

TEST_CASE("wiener_shrink")
{
    CHECK(wiener_shrink(Frame::Zero(8, 8), 5.0).cwiseAbs().maxCoeff() == 0.0);

    const Frame big = Frame::Constant(8, 8, 100.0);
    const Frame out = wiener_shrink(big, 5.0);
    CHECK((out.array() / big.array()).minCoeff() >= 0.99);

    SUBCASE("frozen 6x6 band")
    {
        Frame band(6, 6);
        for (Index i = 0; i < 6; ++i) {
            for (Index j = 0; j < 6; ++j) band(i, j) = 3.0 * std::sin(i + 2.0 * j) + static_cast<double>(i - j);
        }
        const Frame s = wiener_shrink(band, 1.5);
        const double want[] = {0.0, 1.1827151096293056, -2.9152426632859667, -2.9366479190208006,
                               -0.825007713346167, -5.322816390901599, 2.3656447846067383, 0.28050286433725613,
                               -2.5079867374314606, -0.02063230898108567, -1.417795914885615, -5.671073164464275,
                               3.304886164172649, -0.9080367413218372, -0.31632802320513587, 1.3279959975728433,
                               -2.9014557204126437, -3.7451570271738084, 2.555733688100334, -0.6501101581334041,
                               1.6927751556588149, 0.8876389007506114, -2.7197258871123675, -0.5594082184617241,
                               1.2842495616422762, 1.638097526054565, 3.77242939963257, -0.46814632761899,
                               -0.6749000538788976, 0.9781195072208894, 1.574439571659457, 4.5311285144068645,
                               3.1164491899371627, -0.7201503615465036, 0.5467263671639759, 0.8424267854173326};
        for (Index i = 0; i < 36; ++i) CHECK(s.data()[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }

    SUBCASE("white noise at the noise floor is strongly attenuated")
    {
        // The numpy oracle over 20 draws gives a mean ratio of 0.0051 (max 0.0095).
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Frame c = test::random_frame(100 + seed, 64, 64, 0, 5);
            const double ratio = wiener_shrink(c, 5.0).squaredNorm() / c.squaredNorm();
            CHECK(ratio < 0.02);
        }
    }

    SUBCASE("contractive per coefficient")
    {
        const Frame c = test::random_frame(9, 40, 40, 0, 8);
        const Frame s = wiener_shrink(c, 5.0);
        CHECK((s.cwiseAbs().array() <= c.cwiseAbs().array()).all());
    }

    CHECK_THROWS_AS(wiener_shrink(big, 0.0), std::invalid_argument);
}

TEST_CASE("extract_residual")
{
    CHECK(extract_residual(Frame::Constant(40, 40, 120.0)).cwiseAbs().maxCoeff() < 1e-6);

    const Frame f = test::random_frame(4, 50, 70, 128, 20);
    const Frame w1 = extract_residual(f);
    const Frame w2 = extract_residual(f);
    CHECK(w1 == w2);
    CHECK(w1.rows() == 50);
    CHECK(w1.cols() == 70);

    const NoiseSplit split = split_noise(f);
    CHECK(split.residual == w1);
    CHECK(split.content + split.residual == f);

    SUBCASE("residual captures additive noise on a smooth scene")
    {
        Frame clean(96, 96);
        for (Index i = 0; i < 96; ++i) {
            for (Index j = 0; j < 96; ++j) clean(i, j) = 128.0 + 40.0 * std::sin(i / 9.0) * std::cos(j / 13.0);
        }
        const Frame noise = test::random_frame(77, 96, 96, 0, 3.0);
        const Frame w = extract_residual(clean + noise);
        const double noise_energy = noise.squaredNorm();
        // Residual energy is much closer to the noise energy than to zero, and
        // correlates strongly with the noise itself.
        CHECK(w.squaredNorm() > 0.5 * noise_energy);
        CHECK(w.squaredNorm() < 1.5 * noise_energy);
        CHECK(w.cwiseProduct(noise).sum() / (w.norm() * noise.norm()) > 0.8);
        // No DC response.
        CHECK(std::abs(w.mean()) < 1e-3 * 255.0);
    }
}
