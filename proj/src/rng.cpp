#include "sphsym/rng.hpp"

#include <limits>

namespace sphsym {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
    return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(stream),
                         static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
}

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
    auto seq = make_seed_seq(seed, stream);
    engine_.seed(seq);
}

double RngStream::uniform() {
    // 53 random mantissa bits, shifted off zero.
    constexpr double scale = 1.0 / 9007199254740992.0;
    return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::normal() { return normal_(engine_); }

double RngStream::chi_squared(double dof) {
    std::chi_squared_distribution<double> dist(dof);
    return dist(engine_);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t threshold = (std::numeric_limits<std::uint64_t>::max() - bound + 1) % bound;
    for (;;) {
        const std::uint64_t r = engine_();
        if (r >= threshold) return r % bound;
    }
}

RngStream RngStream::derive(std::uint64_t key) const {
    return RngStream(mix(seed_ ^ mix(stream_)), mix(key + 0x632be59bd9b4e019ULL));
}

}  // namespace sphsym
