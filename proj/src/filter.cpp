#include "kqeeg/filter.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace kqeeg {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc_lowpass(double fc_norm, double m) {
    // Impulse response of an ideal lowpass with cutoff fc (normalized to fs),
    // evaluated at offset m from the kernel center.
    if (m == 0.0) return 2.0 * fc_norm;
    return std::sin(2.0 * kPi * fc_norm * m) / (kPi * m);
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Causal FIR via FFT overlap-free full convolution, truncated to input length.
Eigen::ArrayXd convolve_causal(const Eigen::ArrayXd& x, const Eigen::ArrayXd& taps) {
    const std::size_t n = static_cast<std::size_t>(x.size());
    const std::size_t k = static_cast<std::size_t>(taps.size());
    const std::size_t m = next_pow2(n + k - 1);

    std::vector<double> xa(m, 0.0), ha(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) xa[i] = x[static_cast<Eigen::Index>(i)];
    for (std::size_t i = 0; i < k; ++i) ha[i] = taps[static_cast<Eigen::Index>(i)];

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> xf, hf;
    fft.fwd(xf, xa);
    fft.fwd(hf, ha);
    for (std::size_t i = 0; i < m; ++i) xf[i] *= hf[i];
    std::vector<double> y;
    fft.inv(y, xf);

    Eigen::ArrayXd out(x.size());
    for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = y[i];
    return out;
}

} // namespace

FilterKernel design_bandpass_fir(double low_hz, double high_hz, double fs_hz, int order) {
    if (!(fs_hz > 0.0) || !(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < fs_hz / 2.0)) {
        throw InvalidBand("require 0 < low < high < fs/2");
    }
    if (order < 4 || order % 2 != 0) {
        throw OddOrder("filter order must be even and >= 4");
    }

    const int len = order + 1;
    const double center = order / 2.0;
    const double f1 = low_hz / fs_hz;
    const double f2 = high_hz / fs_hz;

    FilterKernel kernel;
    kernel.taps.resize(len);
    kernel.low_hz = low_hz;
    kernel.high_hz = high_hz;
    kernel.fs_hz = fs_hz;
    kernel.order = order;

    for (int n = 0; n < len; ++n) {
        const double m = n - center;
        const double ideal = sinc_lowpass(f2, m) - sinc_lowpass(f1, m);
        const double w = 0.54 - 0.46 * std::cos(2.0 * kPi * n / order);
        kernel.taps[n] = ideal * w;
    }

    // Normalize to unit gain at the geometric middle of the passband.
    const double fc = 0.5 * (low_hz + high_hz);
    const double gain = kernel_magnitude_at(kernel, fc);
    kernel.taps /= gain;
    return kernel;
}

double kernel_magnitude_at(const FilterKernel& kernel, double f_hz) {
    const double w = 2.0 * kPi * f_hz / kernel.fs_hz;
    std::complex<double> h(0.0, 0.0);
    for (Eigen::Index n = 0; n < kernel.taps.size(); ++n) {
        h += kernel.taps[n] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(n)));
    }
    return std::abs(h);
}

Eigen::ArrayXd filter_zero_phase(Eigen::Ref<const Eigen::ArrayXd> signal,
                                 const FilterKernel& kernel) {
    const Eigen::Index n = signal.size();
    const Eigen::Index klen = kernel.taps.size();
    if (n <= klen) {
        throw SignalTooShort("signal length must exceed kernel length");
    }
    if (!signal.allFinite()) {
        throw SignalTooShort("signal contains non-finite samples");
    }

    // Remove the line through the endpoints before extending. The line sits
    // below the passband, and zeroed endpoints make the odd reflection both
    // value- and slope-continuous, so edge transients stay near the stopband
    // floor instead of leaking into the retained samples.
    const double x0 = signal[0];
    const double slope = (signal[n - 1] - x0) / static_cast<double>(n - 1);
    Eigen::ArrayXd detrended =
        signal -
        (x0 + slope * Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)));

    // Reflect one kernel length around each end so the filter transient is
    // absorbed by padding rather than the data.
    const Eigen::Index pad = klen;
    Eigen::ArrayXd ext(n + 2 * pad);
    for (Eigen::Index i = 0; i < pad; ++i) ext[i] = -detrended[pad - i];
    ext.segment(pad, n) = detrended;
    for (Eigen::Index i = 0; i < pad; ++i) ext[pad + n + i] = -detrended[n - 2 - i];

    Eigen::ArrayXd y = convolve_causal(ext, kernel.taps);
    y.reverseInPlace();
    y = convolve_causal(y, kernel.taps);
    y.reverseInPlace();

    return y.segment(pad, n);
}

} // namespace kqeeg
