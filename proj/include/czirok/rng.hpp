#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace czirok {

// splitmix64 finalizer; used to mix seeds and derive per-cell streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive a child seed from a master seed and a list of indices. Mixing is
// sequential, so (seed, i, j) and (seed, j, i) give distinct streams and
// appending axis values never reshuffles earlier cells.
template <typename... Ix>
std::uint64_t derive_seed(std::uint64_t master, Ix... idx) {
    std::uint64_t s = splitmix64(master);
    ((s = splitmix64(s ^ static_cast<std::uint64_t>(idx))), ...);
    return s;
}

// mt19937_64 wrapped with a fixed-consumption Gaussian sampler. Box-Muller
// (non-rejecting) consumes exactly two uniforms per pair, so the draw count
// per agent step is deterministic and independent of the values drawn.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return std::generate_canonical<double, 53>(eng_);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // guard against log(0); 2^-53 keeps the value finite and unbiased in practice
        if (u1 <= 0.0) u1 = 0x1p-53;
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 6.283185307179586476925286766559 * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}
