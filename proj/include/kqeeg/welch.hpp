#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "kqeeg/channel.hpp"
#include "kqeeg/errors.hpp"

namespace kqeeg {

struct InvalidWelchParams : Error {
    using Error::Error;
};

struct AlreadyDecibel : Error {
    using Error::Error;
};

enum class WindowFn { Hamming, Hann, Rectangular };
enum class PowerScale { Linear, Decibel };

std::string to_string(WindowFn w);
WindowFn window_from_string(const std::string& s);

// Welch estimation settings. nfft = 0 resolves to round(fs / 0.5), i.e. a
// 0.5 Hz bin spacing at any sampling rate (1024 at 512 Hz).
struct WelchParams {
    int window_len = 256;
    int overlap = 128;
    int nfft = 0;
    WindowFn window = WindowFn::Hamming;

    int resolve_nfft(double fs_hz) const;
};

// One-sided power spectrum, power per bin (amplitude^2). Summing the linear
// power over all bins estimates mean(x^2).
struct PowerSpectrum {
    ChannelId channel;
    Eigen::ArrayXd freqs_hz;
    Eigen::ArrayXd power;
    PowerScale scale = PowerScale::Linear;
    WelchParams params; // with nfft resolved
    int n_segments = 0;
    double fs_hz = 0.0;

    double bin_hz() const { return fs_hz / params.nfft; }
};

int welch_segment_count(Eigen::Index n, int window_len, int overlap);

// Welch's method: mean-detrended, windowed, zero-padded segments; squared
// magnitudes normalized by window energy; arithmetic mean over segments.
// DC and Nyquist bins unscaled, interior bins doubled.
PowerSpectrum welch_psd(Eigen::Ref<const Eigen::ArrayXd> signal, double fs_hz,
                        const WelchParams& params = {}, ChannelId channel = {});

// 10*log10(max(v, floor)) per bin.
PowerSpectrum to_db(const PowerSpectrum& psd, double floor = 1e-12);

// `freq_hz,power` rows with a comment header recording the Welch settings.
void write_psd_csv(const PowerSpectrum& psd, const std::filesystem::path& path);

} // namespace kqeeg
