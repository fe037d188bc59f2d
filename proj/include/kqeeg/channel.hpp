#pragma once

#include <array>
#include <string>

namespace kqeeg {

// Electrode label. The four forehead-montage channels are first-class;
// arbitrary labels are accepted for other montages.
struct ChannelId {
    std::string name;

    bool operator==(const ChannelId&) const = default;
    bool operator<(const ChannelId& o) const { return name < o.name; }
};

inline const ChannelId kFp1{"Fp1"};
inline const ChannelId kFp2{"Fp2"};
inline const ChannelId kAF7{"AF7"};
inline const ChannelId kAF8{"AF8"};

// Reporting order used for feature vectors and tables.
inline const std::array<ChannelId, 4> kMontage{kAF7, kFp1, kFp2, kAF8};

// Homologous left/right pairs. Asymmetry is defined only on these two pairs
// unless the caller supplies an explicit pairing.
enum class ChannelPair { MidPrefrontal, MidLateral };

inline ChannelId pair_left(ChannelPair p) {
    return p == ChannelPair::MidPrefrontal ? kFp1 : kAF7;
}

inline ChannelId pair_right(ChannelPair p) {
    return p == ChannelPair::MidPrefrontal ? kFp2 : kAF8;
}

inline std::string pair_name(ChannelPair p) {
    return p == ChannelPair::MidPrefrontal ? "Fp2-Fp1" : "AF8-AF7";
}

} // namespace kqeeg
