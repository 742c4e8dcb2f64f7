#pragma once
#include <cstdint>
#include <random>

namespace declab {

// mt19937_64 is specified bit-exactly by the standard; the distributions are not,
// so doubles are formed from the raw 53 high bits.
class Rng {
public:
    explicit Rng(uint64_t seed) : g_(seed) {}
    double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
    uint64_t next() { return g_(); }
private:
    std::mt19937_64 g_;
};

}  // namespace declab
