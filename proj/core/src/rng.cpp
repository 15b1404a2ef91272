#include "sjm/rng.hpp"

#include <array>

namespace sjm {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

std::mt19937_64 seededEngine(std::uint64_t seed, std::uint64_t streamId) {
    std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (streamId + 1));
    std::array<std::uint32_t, 8> words{};
    for (std::size_t k = 0; k < words.size(); k += 2) {
        const std::uint64_t x = splitmix64(state);
        words[k] = static_cast<std::uint32_t>(x);
        words[k + 1] = static_cast<std::uint32_t>(x >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t streamId)
    : seed_(seed), streamId_(streamId), engine_(seededEngine(seed, streamId)) {}

double Rng::uniform() {
    // 53 random bits, shifted off zero.
    while (true) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

double Rng::normal() { return normal_(engine_); }

double Rng::gamma(double shape) {
    std::gamma_distribution<double> g(shape, 1.0);
    return g(engine_);
}

}  // namespace sjm
