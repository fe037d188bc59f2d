#pragma once

#include <Eigen/Dense>

#include "kqeeg/errors.hpp"

namespace kqeeg {

struct InvalidBand : Error {
    using Error::Error;
};

struct OddOrder : Error {
    using Error::Error;
};

struct SignalTooShort : Error {
    using Error::Error;
};

// Linear-phase FIR bandpass kernel. Taps are symmetric; length = order + 1.
struct FilterKernel {
    Eigen::ArrayXd taps;
    double low_hz = 0.0;
    double high_hz = 0.0;
    double fs_hz = 0.0;
    int order = 0;
};

// Hamming-windowed sinc bandpass. Band edges are the -6 dB points of the
// single-pass response; the gain is normalized to unity at mid-band.
FilterKernel design_bandpass_fir(double low_hz, double high_hz, double fs_hz, int order);

// Single-pass magnitude response |H(f)| evaluated directly from the taps.
double kernel_magnitude_at(const FilterKernel& kernel, double f_hz);

// Forward-backward application with reflection padding of one kernel length
// at each end. Output length equals input length; the effective magnitude
// response is |H|^2 and the net group delay is zero.
Eigen::ArrayXd filter_zero_phase(Eigen::Ref<const Eigen::ArrayXd> signal,
                                 const FilterKernel& kernel);

} // namespace kqeeg
