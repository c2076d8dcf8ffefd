#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sphsym/augment.hpp"
#include "sphsym/core.hpp"
#include "sphsym/rng.hpp"

namespace sphsym {

/// bits[i] == 1 keeps (X_i, X'_i); 0 swaps the pair to (X'_i, X_i).
struct SwapMask {
    std::vector<std::uint8_t> bits;

    static SwapMask identity(std::size_t n) { return {std::vector<std::uint8_t>(n, 1)}; }
    SwapMask complement() const;
    std::size_t size() const noexcept { return bits.size(); }
};

enum class Method { exact, monte_carlo };
std::string_view to_string(Method method);

inline constexpr std::size_t default_exact_limit = 20;
inline constexpr std::size_t default_resamples = 500;

struct TestOutcome {
    double statistic = 0.0;
    double p_value = 1.0;
    Method method = Method::monte_carlo;
    std::size_t B = 0;  // 0 for exact enumeration
    double alpha = 0.05;
    bool reject = false;
    double c_alpha_bound = 0.0;  // 2 / (alpha (n - 1))
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t d = 0;
    CenterMode center = CenterMode::none;
    /// Empirical (1 - alpha)-quantile of the resampled statistics; a
    /// diagnostic only, the decision uses p_value.
    double resample_quantile = 0.0;
};

/// zeta_hat of the relabeled pairs (Y_i, Y'_i), read from the cache by
/// index relabeling. Four lookups per pair, no kernel evaluations.
double resample_statistic(const GramCache& cache, const SwapMask& mask);

/// Same value through the pair contrast matrix: sum_{i<j} s_i s_j g_ij with
/// s_i = +1 for kept pairs and -1 for swapped ones. Equal to the relabeling
/// route bit for bit.
double resample_statistic(const PairContrast& contrast, std::span<const double> signs);

/// (1 + #{resamples >= observed}) / (B + 1).
double pvalue_from_resamples(double observed, std::span<const double> resamples);

/// inf{t : F_B(t) >= 1 - alpha} over the resampled statistics.
double empirical_quantile(std::span<const double> resamples, double alpha);

inline double cutoff_bound(double alpha, std::size_t n) {
    return 2.0 / (alpha * static_cast<double>(n - 1));
}

/// Draws B masks i.i.d. uniform on {0,1}^n, 64 mask bits per rng word.
std::vector<SwapMask> draw_masks(std::size_t n, std::size_t B, RngStream& rng);

/// Resampled statistics for B uniformly drawn masks.
std::vector<double> mc_resamples(const PairContrast& contrast, std::size_t B, RngStream& rng);

/// Exact p-value over all 2^n masks. Throws LimitExceeded above `limit`.
TestOutcome exact_pvalue(const GramCache& cache, double alpha = 0.05,
                         std::size_t limit = default_exact_limit);

/// Randomized p-value p_{n,B}. Deterministic given (cache, B, rng state).
TestOutcome mc_pvalue(const GramCache& cache, std::size_t B, RngStream& rng, double alpha = 0.05);

/// Monte Carlo (1 - alpha)-quantile of the resample distribution
/// (observed statistic excluded from the pool).
double critical_value(const GramCache& cache, double alpha, std::size_t B, RngStream& rng);

struct TestOptions {
    double alpha = 0.05;
    std::size_t B = default_resamples;
    CenterMode center = CenterMode::none;
    bool exact = false;
    std::size_t exact_limit = default_exact_limit;
};

/// center -> augment -> build_gram -> zeta_hat -> p-value. The stream
/// feeds augmentation first and then mask draws.
TestOutcome run_test(const Sample& sample, const TestOptions& options, RngStream& rng);

}  // namespace sphsym
