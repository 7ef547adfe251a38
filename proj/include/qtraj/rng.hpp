#pragma once

#include <cstdint>
#include <random>

namespace qtraj {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of trajectory `index` in an ensemble:
///   splitmix64(master_seed ^ splitmix64(index))
/// Independent of how trajectories are distributed over workers.
constexpr std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(master_seed ^ splitmix64(index));
}

/// Stream of uniform variates in the open interval (0, 1).
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the standard. The
/// conversion (x >> 11 + 0.5) * 2^-53 is done here instead of through
/// std::uniform_real_distribution, whose algorithm is implementation defined.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace qtraj
