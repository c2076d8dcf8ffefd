#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace sphsym {

/// n x d matrix of finite observations, stored row-major.
class Sample {
public:
    Sample() = default;
    /// Throws InvalidArgument if data.size() != n*d, n < 1, d < 1 or any
    /// entry is non-finite.
    Sample(std::vector<double> data, std::size_t n, std::size_t d);

    std::size_t n() const noexcept { return n_; }
    std::size_t d() const noexcept { return d_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * d_, d_}; }
    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const Sample&) const = default;

private:
    std::vector<double> data_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
};

/// Observations paired with their spherical variants X'_i = |X_i| U_i.
class AugmentedSample {
public:
    /// Throws InvalidArgument if shapes differ or a variant row does not
    /// preserve its original's norm (1e-9 relative).
    AugmentedSample(Sample original, Sample variant);

    const Sample& original() const noexcept { return original_; }
    const Sample& variant() const noexcept { return variant_; }
    std::size_t n() const noexcept { return original_.n(); }
    std::size_t d() const noexcept { return original_.d(); }

    bool operator==(const AugmentedSample&) const = default;

private:
    Sample original_;
    Sample variant_;
};

/// Gaussian kernel exp(-|x - y|^2 / (2d)). Throws on length mismatch.
double kernel(std::span<const double> x, std::span<const double> y, std::size_t d);

struct ObservationPair {
    std::span<const double> x;
    std::span<const double> x_variant;
};

/// g((x, x'), (y, y')) = K(x,y) + K(x',y') - K(x,y') - K(y,x').
double symmetrized_kernel(const ObservationPair& p1, const ObservationPair& p2, std::size_t d);

/// Dense kernel matrix over the concatenation Z = (X_1..X_n, X'_1..X'_n).
class GramCache {
public:
    std::size_t n() const noexcept { return n_; }
    std::size_t d() const noexcept { return d_; }
    std::size_t size() const noexcept { return 2 * n_; }
    double operator()(std::size_t a, std::size_t b) const { return k_[a * 2 * n_ + b]; }
    /// Number of off-diagonal kernel evaluations performed while building.
    std::size_t evaluations() const noexcept { return evaluations_; }

    friend GramCache build_gram(const AugmentedSample& aug);

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::size_t evaluations_ = 0;
    std::vector<double> k_;
};

GramCache build_gram(const AugmentedSample& aug);

/// Pair contrast read from the cache. Terms are grouped as
/// (K_aa' + K_bb') - (K_ab' + K_ba') so that relabelings of a pair give
/// exactly +-g.
double cached_pair_term(const GramCache& cache, std::size_t i, std::size_t j);

/// Symmetric n x n matrix of g_ij with zero diagonal.
class PairContrast {
public:
    explicit PairContrast(const GramCache& cache);

    std::size_t n() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return g_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {g_.data() + i * n_, n_}; }

private:
    std::size_t n_;
    std::vector<double> g_;
};

/// Sum of term(i, j) over i < j in the fixed order every estimator in the
/// library uses. Row sums run four interleaved accumulators.
template <class Term>
double upper_pair_sum(std::size_t n, Term&& term) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        std::size_t j = i + 1;
        for (; j + 4 <= n; j += 4) {
            acc[0] += term(i, j);
            acc[1] += term(i, j + 1);
            acc[2] += term(i, j + 2);
            acc[3] += term(i, j + 3);
        }
        for (std::size_t lane = 0; j < n; ++j, ++lane) acc[lane] += term(i, j);
        total += (acc[0] + acc[1]) + (acc[2] + acc[3]);
    }
    return total;
}

inline double pair_count(std::size_t n) {
    return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
}

struct ZetaEstimate {
    double value = 0.0;
};

/// U-statistic estimate of zeta from the cache. Requires n >= 2 and a cache
/// built from `aug`.
ZetaEstimate zeta_hat(const AugmentedSample& aug, const GramCache& cache);

/// Same estimate straight from the pair contrast matrix.
double zeta_hat(const PairContrast& contrast);

}  // namespace sphsym
