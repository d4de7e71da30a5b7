// Deterministic random numbers for probes and property tests. Draws are produced
// by fixed arithmetic on raw mt19937_64 output so sequences are identical across
// platforms and standard-library implementations.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "jops/linalg.hpp"

namespace jops {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() { return double(eng_() >> 11) * 0x1.0p-53; }  // [0, 1)

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    long integer(long lo, long hi) {  // inclusive bounds
        return lo + static_cast<long>(uniform01() * double(hi - lo + 1));
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    cplx cnormal() {
        double re = normal(), im = normal();
        return cplx(re, im);
    }

    // Stable per-task seed derivation (splitmix64 of seed xor label hash).
    static std::uint64_t derive(std::uint64_t seed, const std::string& label) {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char ch : label) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        std::uint64_t z = seed ^ h;
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace jops
