#pragma once

#include <cstdint>
#include <vector>

namespace topohk {

// Deterministic random number generator used everywhere randomness is
// required: xoshiro256++ seeded through SplitMix64. Both algorithms are
// fully specified by their reference implementations, so streams are
// bit-identical across platforms and standard library versions
// (std::uniform_real_distribution and friends are not).
//
// Splitting: fork(stream) derives an independent child generator from the
// generator's root seed and the stream id, so per-graph / per-epoch streams
// do not depend on consumption order elsewhere.
class Rng {
public:
    explicit Rng(uint64_t seed) : root_seed_(seed) {
        uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform integer in [0, bound). bound must be > 0.
    uint64_t next_below(uint64_t bound) { return next_u64() % bound; }

    // Fisher-Yates; std::shuffle is implementation-defined, this is not.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent child stream derived from the root seed, not from the
    // current state, so forks are stable regardless of prior consumption.
    Rng fork(uint64_t stream) const {
        uint64_t sm = root_seed_;
        const uint64_t a = splitmix64(sm);
        sm = a ^ (stream * 0x9e3779b97f4a7c15ULL);
        return Rng(splitmix64(sm));
    }

    uint64_t root_seed() const { return root_seed_; }

    // Raw state access for checkpointing.
    std::vector<uint64_t> serialize() const {
        return {root_seed_, state_[0], state_[1], state_[2], state_[3]};
    }
    static Rng deserialize(const std::vector<uint64_t>& words) {
        Rng rng(words.at(0));
        for (int i = 0; i < 4; ++i) rng.state_[i] = words.at(static_cast<size_t>(i) + 1);
        return rng;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t root_seed_;
    uint64_t state_[4];
};

}  // namespace topohk
