#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "kqeeg/channel.hpp"
#include "kqeeg/errors.hpp"
#include "kqeeg/recording.hpp"
#include "kqeeg/welch.hpp"

namespace kqeeg {

struct BandOutOfRange : Error {
    using Error::Error;
};

struct ZeroTotalPower : Error {
    using Error::Error;
};

struct DegenerateAsymmetry : Error {
    using Error::Error;
};

struct ZeroMaxPower : Error {
    using Error::Error;
};

enum class Band : int { Delta = 0, Theta = 1, LowAlpha = 2, HighAlpha = 3 };
inline constexpr int kNumBands = 4;

struct FrequencyBand {
    Band name;
    double lo_hz;
    double hi_hz;
};

// Delta [1, 3.5], Theta [4, 7.5], LowAlpha [8, 10], HighAlpha [10.5, 12].
const std::array<FrequencyBand, kNumBands>& standard_bands();
const FrequencyBand& band_def(Band b);
std::string to_string(Band b);

// Full analysis range; also the denominator of relative power.
inline constexpr double kTotalLoHz = 1.0;
inline constexpr double kTotalHiHz = 12.0;

// Sum of linear PSD bins whose center lies inside [lo, hi], both edges
// inclusive.
double band_power(const PowerSpectrum& psd, const FrequencyBand& band);
double band_power(const PowerSpectrum& psd, double lo_hz, double hi_hz);

// Absolute, dB and relative band power for one channel. Indexed by Band.
struct BandPowers {
    ChannelId channel;
    Eigen::Array4d absolute = Eigen::Array4d::Zero();
    Eigen::Array4d absolute_db = Eigen::Array4d::Zero();
    Eigen::Array4d relative = Eigen::Array4d::Zero();
    double total_power = 0.0; // linear power over the full 1-12 Hz range

    double abs(Band b) const { return absolute[static_cast<int>(b)]; }
    double rel(Band b) const { return relative[static_cast<int>(b)]; }
};

// Band decomposition with relative power = band / total(1-12 Hz).
BandPowers relative_power(const PowerSpectrum& psd, double db_floor = 1e-12);

enum class AsymmetryInput { Relative, Absolute };

struct AsymmetryScore {
    ChannelPair pair;
    Band band;
    double value = 0.0; // |(L - R) / (L + R)|
    double left_power = 0.0;
    double right_power = 0.0;
};

// Normalized left-right difference of alpha-band power for one homologous
// pair. Uses relative band power by default.
AsymmetryScore alpha_asymmetry(const BandPowers& left, const BandPowers& right, Band band,
                               AsymmetryInput input = AsymmetryInput::Relative);

enum class CordanceNorm { WithinChannel, AcrossChannels };

struct CordanceValue {
    ChannelId channel;
    Band band;
    double norm_abs = 0.0; // band power / max band power
    double norm_rel = 0.0;
    double value = 0.0; // (norm_abs - 0.5) + (norm_rel - 0.5)
};

// Max-normalized combination of absolute and relative band power; the max is
// taken over the four bands within the channel.
std::array<CordanceValue, kNumBands> cordance(const BandPowers& bp);

// Variant normalizing each band by its maximum across channels instead.
std::map<std::string, std::array<CordanceValue, kNumBands>> cordance_across_channels(
    const std::map<std::string, BandPowers>& per_channel);

enum class FeatureSet { Theta, LowAlpha, ThetaLowAlpha, Asymmetry, Cordance };

std::string to_string(FeatureSet s);
FeatureSet feature_set_from_string(const std::string& s);

struct FeatureVector {
    std::string subject_id;
    Session session = Session::Baseline;
    std::vector<std::string> names;
    Eigen::VectorXd values;
};

// Assembles the classifier input from per-channel band powers. The default
// ThetaLowAlpha layout is relative theta then relative low alpha, channels
// ordered AF7, Fp1, Fp2, AF8.
FeatureVector build_feature_vector(const std::map<std::string, BandPowers>& per_channel,
                                   FeatureSet set = FeatureSet::ThetaLowAlpha);

} // namespace kqeeg
