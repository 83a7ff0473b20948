#ifndef PRNU_TEST_SUPPORT_HPP
#define PRNU_TEST_SUPPORT_HPP

// Fixtures and brute-force reference implementations shared by the tests.
// The references are deliberately naive and do not call into the library.

#include "prnu/types.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

namespace prnu::test {

inline Frame random_frame(std::uint64_t seed, Index rows, Index cols, double mean = 0.0, double stddev = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(mean, stddev);
    Frame f(rows, cols);
    for (Index i = 0; i < f.size(); ++i) f.data()[i] = normal(rng);
    return f;
}

inline double relative_error(const Frame& got, const Frame& want)
{
    const double scale = std::max(want.norm(), 1e-300);
    return (got - want).norm() / scale;
}

/// Removes the directory on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("prnu_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

namespace oracle {

inline const std::vector<double>& db8_lowpass()
{
    static const std::vector<double> h = {0.23037781330885523,  0.7148465705525415,   0.6308807679295904,
                                          -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
                                          0.032883011666982945, -0.010597401784997278};
    return h;
}

inline std::vector<double> qmf_highpass(const std::vector<double>& h)
{
    std::vector<double> g(h.size());
    for (std::size_t n = 0; n < h.size(); ++n) g[n] = ((n % 2) ? -1.0 : 1.0) * h[h.size() - 1 - n];
    return g;
}

/// Periodic analysis operator as an explicit (n/2) x n matrix.
inline Eigen::MatrixXd analysis_matrix(Index n, const std::vector<double>& taps)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n / 2, n);
    for (Index k = 0; k < n / 2; ++k) {
        for (std::size_t t = 0; t < taps.size(); ++t) m(k, (2 * k + static_cast<Index>(t)) % n) += taps[t];
    }
    return m;
}

struct Subbands {
    Eigen::MatrixXd horizontal, vertical, diagonal;
};

/// One separable analysis step computed by direct convolution sums.
inline Subbands dwt_level_direct(const Eigen::MatrixXd& x, Eigen::MatrixXd& approximation)
{
    const auto& h = db8_lowpass();
    const auto g = qmf_highpass(h);
    const Index R = x.rows(), C = x.cols();
    auto conv = [&](const std::vector<double>& fr, const std::vector<double>& fc) {
        Eigen::MatrixXd out(R / 2, C / 2);
        for (Index i = 0; i < R / 2; ++i) {
            for (Index j = 0; j < C / 2; ++j) {
                double s = 0;
                for (std::size_t a = 0; a < fr.size(); ++a) {
                    for (std::size_t b = 0; b < fc.size(); ++b) {
                        s += fr[a] * fc[b] * x((2 * i + static_cast<Index>(a)) % R, (2 * j + static_cast<Index>(b)) % C);
                    }
                }
                out(i, j) = s;
            }
        }
        return out;
    };
    approximation = conv(h, h);
    return {conv(g, h), conv(h, g), conv(g, g)};
}

/// C(s) = sum_x a'(x) b'(x + s), cyclic, by direct O(n^4) summation.
inline Frame xcorr_direct(const Frame& a_in, const Frame& b_in)
{
    const Frame a = (a_in.array() - a_in.mean()).matrix();
    const Frame b = (b_in.array() - b_in.mean()).matrix();
    const Index R = a.rows(), C = a.cols();
    Frame out(R, C);
    for (Index si = 0; si < R; ++si) {
        for (Index sj = 0; sj < C; ++sj) {
            double s = 0;
            for (Index i = 0; i < R; ++i) {
                for (Index j = 0; j < C; ++j) s += a(i, j) * b((i + si) % R, (j + sj) % C);
            }
            out(si, sj) = s;
        }
    }
    return out;
}

struct DirectPce {
    Index row = 0, col = 0;
    double peak = 0, pce = 0;
    std::size_t excluded = 0;
};

/// Peak = first signed maximum in row-major order; energy = mean of C^2 over
/// bins outside the wrapped window, enumerated explicitly.
inline DirectPce pce_direct(const Frame& surface, int window = 11)
{
    DirectPce r;
    r.peak = surface(0, 0);
    for (Index i = 0; i < surface.rows(); ++i) {
        for (Index j = 0; j < surface.cols(); ++j) {
            if (surface(i, j) > r.peak) {
                r.peak = surface(i, j);
                r.row = i;
                r.col = j;
            }
        }
    }
    std::set<std::pair<Index, Index>> excluded;
    const int half = window / 2;
    for (int di = -half; di <= half; ++di) {
        for (int dj = -half; dj <= half; ++dj) {
            const Index i = ((r.row + di) % surface.rows() + surface.rows()) % surface.rows();
            const Index j = ((r.col + dj) % surface.cols() + surface.cols()) % surface.cols();
            excluded.insert({i, j});
        }
    }
    double energy = 0;
    std::size_t count = 0;
    for (Index i = 0; i < surface.rows(); ++i) {
        for (Index j = 0; j < surface.cols(); ++j) {
            if (excluded.contains({i, j})) continue;
            energy += surface(i, j) * surface(i, j);
            ++count;
        }
    }
    r.excluded = excluded.size();
    r.pce = r.peak * r.peak / (energy / static_cast<double>(count));
    return r;
}

/// Formula-defined 16x16 pair shared with tests/oracle/frozen_values.py.
inline std::pair<Frame, Frame> formula_pair()
{
    Frame a(16, 16), b(16, 16);
    for (Index i = 0; i < 16; ++i) {
        for (Index j = 0; j < 16; ++j) {
            a(i, j) = std::sin(0.37 * i * i + 1.1 * j) + 0.5 * std::cos(0.23 * j * j - 0.7 * i);
        }
    }
    for (Index i = 0; i < 16; ++i) {
        for (Index j = 0; j < 16; ++j) {
            b(i, j) = 0.8 * a((i + 3) % 16, (j + 5) % 16) + 0.3 * std::sin(1.7 * i * j + 0.2);
        }
    }
    return {a, b};
}

} // namespace oracle
} // namespace prnu::test

#endif // PRNU_TEST_SUPPORT_HPP
