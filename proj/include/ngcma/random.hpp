#pragma once

#include <cstdint>
#include <random>

namespace ngcma {

/// Seeded, splittable pseudo-random source. There is no global generator:
/// every sampling routine takes an Rng (or a seed) explicitly.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    double normal();
    double uniform();  // [0, 1)
    double uniform(double lo, double hi);
    std::uint64_t next_u64() { return engine_(); }

    /// Independent child stream; the same (seed, stream) pair always yields
    /// the same child.
    Rng split(std::uint64_t stream) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ngcma
