#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kqeeg/rng.hpp"
#include "kqeeg/welch.hpp"

using namespace kqeeg;

namespace {

Eigen::ArrayXd sinusoid(double f_hz, double fs_hz, double seconds, double amp = 1.0) {
    const Eigen::Index n = static_cast<Eigen::Index>(seconds * fs_hz);
    Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) / fs_hz;
    return amp * (2.0 * std::numbers::pi * f_hz * t).sin();
}

} // namespace

TEST_CASE("unit sinusoid peaks at its frequency and obeys Parseval") {
    const Eigen::ArrayXd x = sinusoid(8.0, 512.0, 60.0);
    const PowerSpectrum psd = welch_psd(x, 512.0);

    // Default nfft resolves to 0.5 Hz bins at 512 Hz.
    CHECK(psd.params.nfft == 1024);
    CHECK(psd.bin_hz() == doctest::Approx(0.5));

    Eigen::Index argmax = 0;
    psd.power.maxCoeff(&argmax);
    CHECK(psd.freqs_hz[argmax] == doctest::Approx(8.0));

    // mean(x^2) of a unit sinusoid is 0.5.
    const double total = psd.power.sum();
    CHECK(total == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("all-zero input gives an all-zero spectrum") {
    const Eigen::ArrayXd x = Eigen::ArrayXd::Zero(4096);
    const PowerSpectrum psd = welch_psd(x, 512.0);
    CHECK(psd.power.maxCoeff() == 0.0);
    CHECK(psd.power.minCoeff() == 0.0);
}

TEST_CASE("white noise total power matches the variance") {
    const double sigma = 2.0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(1000 + static_cast<std::uint64_t>(trial));
        Eigen::ArrayXd x(512 * 10);
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal(0.0, sigma);
        const PowerSpectrum psd = welch_psd(x, 512.0);
        const double total = psd.power.sum();
        CHECK(std::abs(total / (sigma * sigma) - 1.0) < 0.10);
    }
}

TEST_CASE("power scales with the square of the amplitude") {
    const Eigen::ArrayXd x = sinusoid(5.0, 512.0, 10.0) + sinusoid(9.0, 512.0, 10.0, 0.3);
    const PowerSpectrum p1 = welch_psd(x, 512.0);
    const PowerSpectrum p3 = welch_psd((3.0 * x).eval(), 512.0);
    const double scale = p1.power.maxCoeff();
    CHECK(((p3.power - 9.0 * p1.power).abs() / scale).maxCoeff() < 1e-9);
}

TEST_CASE("segment count follows the overlap formula") {
    WelchParams params;
    params.window_len = 256;
    params.overlap = 128;
    const Eigen::ArrayXd x = Eigen::ArrayXd::Random(1024);
    const PowerSpectrum psd = welch_psd(x, 512.0, params);
    CHECK(psd.n_segments == (1024 - 256) / 128 + 1);
    CHECK(welch_segment_count(30720, 256, 128) == 239);
}

TEST_CASE("zero-padding refines bins without changing total power") {
    const Eigen::ArrayXd x = sinusoid(6.0, 512.0, 20.0) + sinusoid(10.0, 512.0, 20.0, 0.5);
    WelchParams p512;
    p512.nfft = 512;
    WelchParams p1024;
    p1024.nfft = 1024;
    const double t512 = welch_psd(x, 512.0, p512).power.sum();
    const double t1024 = welch_psd(x, 512.0, p1024).power.sum();
    CHECK(std::abs(t512 / t1024 - 1.0) < 0.02);
}

TEST_CASE("bin spacing is uniform at fs/nfft") {
    const Eigen::ArrayXd x = Eigen::ArrayXd::Random(2048);
    const PowerSpectrum psd = welch_psd(x, 512.0);
    const double expected = 512.0 / psd.params.nfft;
    for (Eigen::Index i = 1; i < psd.freqs_hz.size(); ++i) {
        CHECK(psd.freqs_hz[i] - psd.freqs_hz[i - 1] == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(psd.freqs_hz.size() == psd.power.size());
    CHECK(psd.power.minCoeff() >= 0.0);
}

TEST_CASE("decibel conversion applies the floor rule") {
    PowerSpectrum psd;
    psd.freqs_hz = Eigen::ArrayXd::LinSpaced(3, 0.0, 1.0);
    psd.power.resize(3);
    psd.power << 1.0, 100.0, 0.0;
    psd.scale = PowerScale::Linear;

    const PowerSpectrum db = to_db(psd);
    CHECK(db.power[0] == doctest::Approx(0.0));
    CHECK(db.power[1] == doctest::Approx(20.0));
    CHECK(db.power[2] == doctest::Approx(-120.0));
    CHECK(db.scale == PowerScale::Decibel);
    CHECK_THROWS_AS(to_db(db), AlreadyDecibel);
}

TEST_CASE("invalid parameters are rejected") {
    const Eigen::ArrayXd x = Eigen::ArrayXd::Random(100);
    CHECK_THROWS_AS(welch_psd(x, 512.0), InvalidWelchParams); // shorter than one window

    WelchParams bad;
    bad.nfft = 128; // < window_len
    const Eigen::ArrayXd ok = Eigen::ArrayXd::Random(1024);
    CHECK_THROWS_AS(welch_psd(ok, 512.0, bad), InvalidWelchParams);

    WelchParams bad_overlap;
    bad_overlap.overlap = 256;
    CHECK_THROWS_AS(welch_psd(ok, 512.0, bad_overlap), InvalidWelchParams);
}
