#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace propsel {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a stream id.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
}

// Deterministic RNG wrapper. Bounded draws use rejection sampling on the
// raw mt19937_64 output, so sequences do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next() { return gen_(); }

    // Uniform in [0, n). n must be > 0.
    uint64_t below(uint64_t n) {
        const uint64_t rem = std::numeric_limits<uint64_t>::max() % n;
        const uint64_t bound = std::numeric_limits<uint64_t>::max() - rem;
        for (;;) {
            uint64_t r = gen_();
            if (r <= bound) return r % n;
        }
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double unit() { return (gen_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace propsel
