#pragma once

#include <cmath>
#include <cstdint>

#include "roomtex/math.hpp"

namespace roomtex {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// xoshiro256** with explicit distributions. std::mt19937 would do, but the
// standard distributions are implementation-defined; outputs here must be
// reproducible byte-for-byte across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        for (int i = 0; i < 4; ++i) s_[i] = seed = splitmix64(seed);
        have_gauss_ = false;
    }

    // Independent deterministic substream, e.g. one per frame.
    Rng fork(uint64_t stream) const {
        return Rng(splitmix64(s_[0] ^ splitmix64(stream ^ 0xa5a5a5a5deadbeefULL)));
    }

    uint64_t next_u64() {
        auto rotl = [](uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        uint64_t result = rotl(s_[1] * 5, 7) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double u01() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

    // Box-Muller; deterministic across platforms unlike std::normal_distribution.
    double normal(double mean = 0.0, double stddev = 1.0) {
        if (have_gauss_) {
            have_gauss_ = false;
            return mean + stddev * gauss_;
        }
        double u1 = u01(), u2 = u01();
        while (u1 <= 1e-300) u1 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * kPi * u2;
        gauss_ = r * std::sin(a);
        have_gauss_ = true;
        return mean + stddev * r * std::cos(a);
    }

    Vec3 unit_vector3() {
        while (true) {
            Vec3 v{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
            double n = norm(v);
            if (n > 1e-6 && n <= 1.0) return v / n;
        }
    }

private:
    uint64_t s_[4];
    double gauss_ = 0;
    bool have_gauss_;
};

}  // namespace roomtex
