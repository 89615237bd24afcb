#pragma once

// Counter-based seeding. Task i of a run with master seed s draws from
// std::mt19937_64 seeded with splitmix64(s + i * golden), and
// doubles are built from the top 53 bits, so results do not depend on the
// standard library's distribution implementations.

#include <cstdint>
#include <random>

namespace magflow {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t task_seed(std::uint64_t master, std::uint64_t task) {
    return splitmix64(master + task * 0x9E3779B97F4A7C15ULL);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace magflow
