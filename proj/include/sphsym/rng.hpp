#pragma once

#include <cstdint>
#include <random>

namespace sphsym {

/// Seeded random stream. Identical (seed, stream) pairs reproduce identical
/// draws; distinct stream ids are decorrelated through std::seed_seq mixing.
///
/// Raw 64-bit words come straight from mt19937_64 and are portable. Normal
/// and gamma variates use the standard library distributions, so they are
/// reproducible for a given standard library build.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi);
    double normal();
    double chi_squared(double dof);
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    /// Child stream derived from this stream's (seed, stream) and a key,
    /// independent of how many draws this stream has made.
    RngStream derive(std::uint64_t key) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sphsym
