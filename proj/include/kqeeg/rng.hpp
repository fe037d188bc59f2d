#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace kqeeg {

// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
// is fully specified by the standard) and derives every distribution from raw
// draws, so identical seeds give identical streams on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller.
    double normal() {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Uniform integer in [0, n). Modulo bias is negligible for n << 2^64.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // Independent child stream; the salt keeps sibling streams decorrelated.
    Rng derive(std::uint64_t salt) const {
        return Rng(splitmix(seed_ ^ (0x9E3779B97F4A7C15ULL * (salt + 1))));
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace kqeeg
