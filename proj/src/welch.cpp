#include "kqeeg/welch.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace kqeeg {

namespace {

Eigen::ArrayXd make_window(WindowFn fn, int len) {
    Eigen::ArrayXd w(len);
    const double pi = std::numbers::pi;
    for (int n = 0; n < len; ++n) {
        switch (fn) {
            case WindowFn::Hamming:
                w[n] = 0.54 - 0.46 * std::cos(2.0 * pi * n / (len - 1));
                break;
            case WindowFn::Hann:
                w[n] = 0.5 - 0.5 * std::cos(2.0 * pi * n / (len - 1));
                break;
            case WindowFn::Rectangular:
                w[n] = 1.0;
                break;
        }
    }
    return w;
}

} // namespace

std::string to_string(WindowFn w) {
    switch (w) {
        case WindowFn::Hamming: return "hamming";
        case WindowFn::Hann: return "hann";
        case WindowFn::Rectangular: return "rectangular";
    }
    return "?";
}

WindowFn window_from_string(const std::string& s) {
    if (s == "hamming") return WindowFn::Hamming;
    if (s == "hann") return WindowFn::Hann;
    if (s == "rectangular") return WindowFn::Rectangular;
    throw InvalidWelchParams("unknown window function: " + s);
}

int WelchParams::resolve_nfft(double fs_hz) const {
    if (nfft > 0) return nfft;
    // Default to 0.5 Hz bins, never below the window length.
    const int target = static_cast<int>(std::lround(fs_hz / 0.5));
    return std::max(target, window_len);
}

int welch_segment_count(Eigen::Index n, int window_len, int overlap) {
    const int step = window_len - overlap;
    return static_cast<int>((n - window_len) / step) + 1;
}

PowerSpectrum welch_psd(Eigen::Ref<const Eigen::ArrayXd> signal, double fs_hz,
                        const WelchParams& params, ChannelId channel) {
    if (!(fs_hz > 0.0)) throw InvalidWelchParams("fs_hz must be > 0");
    if (params.window_len < 2) throw InvalidWelchParams("window_len must be >= 2");
    if (params.overlap < 0 || params.overlap >= params.window_len) {
        throw InvalidWelchParams("require 0 <= overlap < window_len");
    }
    const int nfft = params.resolve_nfft(fs_hz);
    if (params.nfft > 0 && params.nfft < params.window_len) {
        throw InvalidWelchParams("nfft must be >= window_len");
    }
    if (signal.size() < params.window_len) {
        throw InvalidWelchParams("signal shorter than one window");
    }
    if (!signal.allFinite()) throw InvalidWelchParams("signal contains non-finite samples");

    const int wl = params.window_len;
    const int step = wl - params.overlap;
    const int n_segments = welch_segment_count(signal.size(), wl, params.overlap);
    const Eigen::ArrayXd window = make_window(params.window, wl);
    const double window_energy = window.square().sum();
    const int n_bins = nfft / 2 + 1;

    Eigen::FFT<double> fft;
    std::vector<double> buf(static_cast<std::size_t>(nfft), 0.0);
    std::vector<std::complex<double>> spec;
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(n_bins);

    for (int s = 0; s < n_segments; ++s) {
        const Eigen::Index start = static_cast<Eigen::Index>(s) * step;
        const Eigen::ArrayXd seg = signal.segment(start, wl);
        const Eigen::ArrayXd detrended = seg - seg.mean();
        for (int i = 0; i < wl; ++i) buf[static_cast<std::size_t>(i)] = detrended[i] * window[i];
        for (int i = wl; i < nfft; ++i) buf[static_cast<std::size_t>(i)] = 0.0;

        fft.fwd(spec, buf);
        for (int k = 0; k < n_bins; ++k) {
            acc[k] += std::norm(spec[static_cast<std::size_t>(k)]);
        }
    }

    PowerSpectrum psd;
    psd.channel = std::move(channel);
    psd.fs_hz = fs_hz;
    psd.params = params;
    psd.params.nfft = nfft;
    psd.n_segments = n_segments;
    psd.scale = PowerScale::Linear;
    psd.freqs_hz =
        Eigen::ArrayXd::LinSpaced(n_bins, 0.0, static_cast<double>(n_bins - 1)) * (fs_hz / nfft);
    // Per-bin power: |X|^2 / (nfft * sum(w^2)); one-sided fold doubles the
    // interior bins, leaving DC and Nyquist unscaled.
    psd.power = acc / (static_cast<double>(n_segments) * nfft * window_energy);
    for (int k = 1; k < n_bins - (nfft % 2 == 0 ? 1 : 0); ++k) psd.power[k] *= 2.0;
    return psd;
}

PowerSpectrum to_db(const PowerSpectrum& psd, double floor) {
    if (psd.scale == PowerScale::Decibel) {
        throw AlreadyDecibel("power spectrum already on the decibel scale");
    }
    if (!(floor > 0.0)) throw InvalidWelchParams("db floor must be > 0");
    PowerSpectrum out = psd;
    out.scale = PowerScale::Decibel;
    out.power = 10.0 * psd.power.max(floor).log10();
    return out;
}

void write_psd_csv(const PowerSpectrum& psd, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write psd csv: " + path.string());
    out << "# welch window_len=" << psd.params.window_len << " overlap=" << psd.params.overlap
        << " nfft=" << psd.params.nfft << " window=" << to_string(psd.params.window)
        << " segments=" << psd.n_segments << " fs_hz=" << psd.fs_hz
        << " scale=" << (psd.scale == PowerScale::Linear ? "linear" : "db") << '\n';
    out << "freq_hz,power\n";
    char buf[64];
    for (Eigen::Index i = 0; i < psd.freqs_hz.size(); ++i) {
        const int m = std::snprintf(buf, sizeof(buf), "%.9g,%.12g\n", psd.freqs_hz[i], psd.power[i]);
        out.write(buf, m);
    }
}

} // namespace kqeeg
