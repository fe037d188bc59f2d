#include "kqeeg/features.hpp"

#include <algorithm>
#include <cmath>

namespace kqeeg {

namespace {

constexpr double kEdgeTol = 1e-9;

} // namespace

const std::array<FrequencyBand, kNumBands>& standard_bands() {
    static const std::array<FrequencyBand, kNumBands> bands{{
        {Band::Delta, 1.0, 3.5},
        {Band::Theta, 4.0, 7.5},
        {Band::LowAlpha, 8.0, 10.0},
        {Band::HighAlpha, 10.5, 12.0},
    }};
    return bands;
}

const FrequencyBand& band_def(Band b) {
    return standard_bands()[static_cast<std::size_t>(b)];
}

std::string to_string(Band b) {
    switch (b) {
        case Band::Delta: return "delta";
        case Band::Theta: return "theta";
        case Band::LowAlpha: return "low_alpha";
        case Band::HighAlpha: return "high_alpha";
    }
    return "?";
}

double band_power(const PowerSpectrum& psd, double lo_hz, double hi_hz) {
    if (psd.scale != PowerScale::Linear) {
        throw BandOutOfRange("band_power requires a linear-scale spectrum");
    }
    if (psd.freqs_hz.size() == 0 || lo_hz < psd.freqs_hz[0] - kEdgeTol ||
        hi_hz > psd.freqs_hz[psd.freqs_hz.size() - 1] + kEdgeTol) {
        throw BandOutOfRange("band outside the spectrum's frequency range");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < psd.freqs_hz.size(); ++i) {
        const double f = psd.freqs_hz[i];
        if (f >= lo_hz - kEdgeTol && f <= hi_hz + kEdgeTol) sum += psd.power[i];
    }
    return sum;
}

double band_power(const PowerSpectrum& psd, const FrequencyBand& band) {
    return band_power(psd, band.lo_hz, band.hi_hz);
}

BandPowers relative_power(const PowerSpectrum& psd, double db_floor) {
    BandPowers bp;
    bp.channel = psd.channel;
    bp.total_power = band_power(psd, kTotalLoHz, kTotalHiHz);
    if (!(bp.total_power > 0.0)) {
        throw ZeroTotalPower("total 1-12 Hz power is zero");
    }
    for (const auto& band : standard_bands()) {
        const int i = static_cast<int>(band.name);
        bp.absolute[i] = band_power(psd, band);
        bp.absolute_db[i] = 10.0 * std::log10(std::max(bp.absolute[i], db_floor));
        bp.relative[i] = bp.absolute[i] / bp.total_power;
    }
    return bp;
}

AsymmetryScore alpha_asymmetry(const BandPowers& left, const BandPowers& right, Band band,
                               AsymmetryInput input) {
    if (band != Band::LowAlpha && band != Band::HighAlpha) {
        throw BandOutOfRange("asymmetry is defined on the alpha bands only");
    }
    const bool rel = input == AsymmetryInput::Relative;
    const double pl = rel ? left.rel(band) : left.abs(band);
    const double pr = rel ? right.rel(band) : right.abs(band);
    if (!(pl + pr > 0.0)) {
        throw DegenerateAsymmetry("left + right power is zero");
    }
    AsymmetryScore score;
    score.pair = (left.channel == kFp1 || right.channel == kFp2) ? ChannelPair::MidPrefrontal
                                                                 : ChannelPair::MidLateral;
    score.band = band;
    score.left_power = pl;
    score.right_power = pr;
    score.value = std::abs((pl - pr) / (pl + pr));
    return score;
}

std::array<CordanceValue, kNumBands> cordance(const BandPowers& bp) {
    const double max_abs = bp.absolute.maxCoeff();
    const double max_rel = bp.relative.maxCoeff();
    if (!(max_abs > 0.0) || !(max_rel > 0.0)) {
        throw ZeroMaxPower("max band power is zero");
    }
    std::array<CordanceValue, kNumBands> out;
    for (int i = 0; i < kNumBands; ++i) {
        CordanceValue& cv = out[static_cast<std::size_t>(i)];
        cv.channel = bp.channel;
        cv.band = static_cast<Band>(i);
        cv.norm_abs = bp.absolute[i] / max_abs;
        cv.norm_rel = bp.relative[i] / max_rel;
        cv.value = (cv.norm_abs - 0.5) + (cv.norm_rel - 0.5);
    }
    return out;
}

std::map<std::string, std::array<CordanceValue, kNumBands>> cordance_across_channels(
    const std::map<std::string, BandPowers>& per_channel) {
    Eigen::Array4d max_abs = Eigen::Array4d::Zero();
    Eigen::Array4d max_rel = Eigen::Array4d::Zero();
    for (const auto& [name, bp] : per_channel) {
        max_abs = max_abs.max(bp.absolute);
        max_rel = max_rel.max(bp.relative);
    }
    if (!(max_abs.minCoeff() > 0.0) || !(max_rel.minCoeff() > 0.0)) {
        throw ZeroMaxPower("a band has zero power on every channel");
    }
    std::map<std::string, std::array<CordanceValue, kNumBands>> out;
    for (const auto& [name, bp] : per_channel) {
        std::array<CordanceValue, kNumBands> vals;
        for (int i = 0; i < kNumBands; ++i) {
            CordanceValue& cv = vals[static_cast<std::size_t>(i)];
            cv.channel = bp.channel;
            cv.band = static_cast<Band>(i);
            cv.norm_abs = bp.absolute[i] / max_abs[i];
            cv.norm_rel = bp.relative[i] / max_rel[i];
            cv.value = (cv.norm_abs - 0.5) + (cv.norm_rel - 0.5);
        }
        out.emplace(name, vals);
    }
    return out;
}

std::string to_string(FeatureSet s) {
    switch (s) {
        case FeatureSet::Theta: return "theta";
        case FeatureSet::LowAlpha: return "low_alpha";
        case FeatureSet::ThetaLowAlpha: return "theta_low_alpha";
        case FeatureSet::Asymmetry: return "asymmetry";
        case FeatureSet::Cordance: return "cordance";
    }
    return "?";
}

FeatureSet feature_set_from_string(const std::string& s) {
    if (s == "theta") return FeatureSet::Theta;
    if (s == "low_alpha") return FeatureSet::LowAlpha;
    if (s == "theta_low_alpha") return FeatureSet::ThetaLowAlpha;
    if (s == "asymmetry") return FeatureSet::Asymmetry;
    if (s == "cordance") return FeatureSet::Cordance;
    throw Error("unknown feature set: " + s);
}

FeatureVector build_feature_vector(const std::map<std::string, BandPowers>& per_channel,
                                   FeatureSet set) {
    for (const auto& ch : kMontage) {
        if (per_channel.find(ch.name) == per_channel.end()) {
            throw MissingChannel("feature vector needs channel " + ch.name);
        }
    }

    FeatureVector fv;
    std::vector<double> values;
    auto push_band = [&](Band band) {
        for (const auto& ch : kMontage) {
            fv.names.push_back("rel_" + to_string(band) + "_" + ch.name);
            values.push_back(per_channel.at(ch.name).rel(band));
        }
    };

    switch (set) {
        case FeatureSet::Theta:
            push_band(Band::Theta);
            break;
        case FeatureSet::LowAlpha:
            push_band(Band::LowAlpha);
            break;
        case FeatureSet::ThetaLowAlpha:
            push_band(Band::Theta);
            push_band(Band::LowAlpha);
            break;
        case FeatureSet::Asymmetry:
            for (const Band band : {Band::LowAlpha, Band::HighAlpha}) {
                for (const ChannelPair pair :
                     {ChannelPair::MidLateral, ChannelPair::MidPrefrontal}) {
                    const auto score = alpha_asymmetry(per_channel.at(pair_left(pair).name),
                                                       per_channel.at(pair_right(pair).name), band);
                    fv.names.push_back("asym_" + to_string(band) + "_" + pair_name(pair));
                    values.push_back(score.value);
                }
            }
            break;
        case FeatureSet::Cordance:
            for (const auto& ch : kMontage) {
                const auto vals = cordance(per_channel.at(ch.name));
                fv.names.push_back("cordance_theta_" + ch.name);
                values.push_back(vals[static_cast<std::size_t>(Band::Theta)].value);
            }
            break;
    }

    fv.values = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                  static_cast<Eigen::Index>(values.size()));
    return fv;
}

} // namespace kqeeg
