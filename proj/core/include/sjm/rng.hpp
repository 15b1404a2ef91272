#pragma once

#include <cstdint>
#include <random>

namespace sjm {

/// Seeded generator for one stream of draws.
///
/// The engine state is derived from (seed, streamId) through SplitMix64, so
/// distinct stream ids give independent-looking streams for parallel
/// replicates. A given (seed, streamId, call sequence) reproduces the same
/// draws bit for bit with the same standard library.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t streamId = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t streamId() const { return streamId_; }

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Gamma with unit scale.
    double gamma(double shape);

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t streamId_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// One SplitMix64 step; exposed for deriving child seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace sjm
