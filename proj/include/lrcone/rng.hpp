#pragma once

#include <cstdint>
#include <cmath>

namespace lrcone {

// Splitmix64. All randomness in the library flows from one config seed through
// split(): child streams are keyed by (seed, tag...) so sampling order never
// matters and results are bit-reproducible across --jobs values and platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // burn-in decorrelates trivially related seeds
        splitmix64(state_);
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform on [0, 1); 53-bit mantissa
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on [-1, 1]
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    // standard normal via Box-Muller (hand-rolled: std::normal_distribution is
    // implementation-defined, which would break bit-reproducibility guarantees)
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Derive a child seed from a base seed and a stream tag. Documented splitting
// scheme: seed_k = mix(mix(base) xor mix(tag_0) ... xor mix(tag_{k-1})).
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    std::uint64_t t = tag + 0x632be59bd9b4e019ULL;
    std::uint64_t b = splitmix64(t);
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t tag1, std::uint64_t tag2) {
    return split_seed(split_seed(base, tag1), tag2);
}

} // namespace lrcone
