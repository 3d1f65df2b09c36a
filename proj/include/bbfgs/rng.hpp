#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bbfgs {

/// Seedable random stream: an mt19937_64 engine plus portable uniform and
/// normal draws (rejection sampling and the polar method respectively, so
/// output does not depend on the standard library's distribution
/// implementations). Child streams are derived with splitmix64 over
/// (seed, tag), giving independent streams for S/T sampling, sketching
/// and the random-iterate pick.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    /// Independent stream derived from this stream's seed and a tag.
    Rng child(std::uint64_t tag) const {
        return Rng(splitmix64(seed_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1))));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound), bound >= 1. Unbiased via rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform double in [0, 1) with 53 bits.
    double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Marsaglia's polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double mul = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * mul;
        have_spare_ = true;
        return u * mul;
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace bbfgs
