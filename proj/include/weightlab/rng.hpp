#pragma once

#include <cstdint>

namespace weightlab {

// Deterministic RNG (splitmix64). We avoid <random> distributions because
// their output sequences are implementation-defined; experiment artifacts
// must be byte-identical for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // index in [0, n)
    std::uint64_t index(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // standard normal via Box-Muller (uncached, fully deterministic)
    double normal();

    // independent stream derived from this seed and a stream id
    Rng fork(std::uint64_t stream) const;

private:
    std::uint64_t state_;
};

} // namespace weightlab
