#ifndef CTCM_RNG_HPP
#define CTCM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ctcm {

// 64-bit finalizer used to decorrelate substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic RNG wrapper. All variate transforms are written out here
// instead of using <random> distributions, so identical seeds give identical
// streams on every platform and compiler.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard exponential, strictly positive so jump times strictly increase.
    double exponential() {
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        return -std::log(u);
    }

    // Box-Muller; the paired variate is cached within this stream.
    double normal(double mean, double sd) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sd * spare_;
        }
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        const double v = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return mean + sd * r * std::cos(a);
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Stream for trajectory `index` under a master seed. Depends on (seed, index)
// only, so results are invariant to thread count and launch order.
inline Rng substream_rng(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t h = splitmix64(seed);
    return Rng(splitmix64(h ^ splitmix64(index + 0x51ED270B35E0D1E5ull)));
}

} // namespace ctcm

#endif
