#pragma once

#include <cmath>
#include <cstdint>

namespace ergo {

// Counter-based splittable random numbers. Every draw is a pure function
// of (seed, stream, counter), so particle updates can run on any number
// of workers in any order and still produce identical results.
//
// The mixer is the splitmix64 finalizer applied to an odd-multiplier
// combination of the key words.
struct CounterRng {
    static constexpr const char* kAlgorithm = "splitmix64-counter";

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
        std::uint64_t z = seed;
        z = mix(z ^ (stream * 0xd1342543de82ef95ULL));
        z = mix(z ^ (counter * 0xaf251af3b0f025b5ULL));
        return z;
    }

    // Uniform in (0, 1): never returns 0 or 1 exactly.
    static double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
        std::uint64_t w = word(seed, stream, counter);
        return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; `which` in {0, 1} selects the pair member.
    static double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                         int which = 0) {
        double u1 = uniform(seed, stream * 2 + 1, counter);
        double u2 = uniform(seed, stream * 2 + 2, counter);
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        return which == 0 ? r * std::cos(theta) : r * std::sin(theta);
    }
};

}  // namespace ergo
