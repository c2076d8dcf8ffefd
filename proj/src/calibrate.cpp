#include "sphsym/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sphsym/error.hpp"

namespace sphsym {

SwapMask SwapMask::complement() const {
    SwapMask out{bits};
    for (auto& b : out.bits) b = b ? 0 : 1;
    return out;
}

std::string_view to_string(Method method) {
    return method == Method::exact ? "exact" : "monte-carlo";
}

double resample_statistic(const GramCache& cache, const SwapMask& mask) {
    const std::size_t n = cache.n();
    if (mask.size() != n)
        throw InvalidArgument("mask length " + std::to_string(mask.size()) +
                              " does not match n = " + std::to_string(n));
    if (n < 2) throw InvalidArgument("resample_statistic needs n >= 2");
    // Position of Y_i and Y'_i in the Gram ordering.
    auto y = [&](std::size_t i) { return mask.bits[i] ? i : n + i; };
    auto y_variant = [&](std::size_t i) { return mask.bits[i] ? n + i : i; };
    const double total = upper_pair_sum(n, [&](std::size_t i, std::size_t j) {
        return (cache(y(i), y(j)) + cache(y_variant(i), y_variant(j))) -
               (cache(y(i), y_variant(j)) + cache(y(j), y_variant(i)));
    });
    return total / pair_count(n);
}

double resample_statistic(const PairContrast& contrast, std::span<const double> signs) {
    const std::size_t n = contrast.n();
    if (signs.size() != n) throw InvalidArgument("sign vector length does not match n");
    if (n < 2) throw InvalidArgument("resample_statistic needs n >= 2");
    const double total = upper_pair_sum(n, [&](std::size_t i, std::size_t j) {
        return (signs[i] * signs[j]) * contrast(i, j);
    });
    return total / pair_count(n);
}

double pvalue_from_resamples(double observed, std::span<const double> resamples) {
    std::size_t hits = 0;
    for (double v : resamples)
        if (v >= observed) ++hits;
    return static_cast<double>(hits + 1) / static_cast<double>(resamples.size() + 1);
}

double empirical_quantile(std::span<const double> resamples, double alpha) {
    if (resamples.empty()) throw InvalidArgument("empirical_quantile needs resamples");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    std::vector<double> sorted(resamples.begin(), resamples.end());
    std::sort(sorted.begin(), sorted.end());
    // Smallest k with k / B >= 1 - alpha; the slack absorbs 0.95 * 500 > 475.
    const double target = (1.0 - alpha) * static_cast<double>(sorted.size());
    auto k = static_cast<std::size_t>(std::ceil(target - 1e-9));
    k = std::clamp<std::size_t>(k, 1, sorted.size());
    return sorted[k - 1];
}

std::vector<SwapMask> draw_masks(std::size_t n, std::size_t B, RngStream& rng) {
    std::vector<SwapMask> masks(B);
    for (auto& mask : masks) {
        mask.bits.resize(n);
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i % 64 == 0) word = rng.next_u64();
            mask.bits[i] = static_cast<std::uint8_t>(word & 1u);
            word >>= 1;
        }
    }
    return masks;
}

std::vector<double> mc_resamples(const PairContrast& contrast, std::size_t B, RngStream& rng) {
    if (B < 1) throw InvalidArgument("B must be at least 1");
    const std::size_t n = contrast.n();
    std::vector<double> values(B);
    std::vector<double> signs(n);
    for (std::size_t b = 0; b < B; ++b) {
        // Same bit layout as draw_masks.
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i % 64 == 0) word = rng.next_u64();
            signs[i] = (word & 1u) ? 1.0 : -1.0;
            word >>= 1;
        }
        values[b] = resample_statistic(contrast, signs);
    }
    return values;
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

}  // namespace

TestOutcome exact_pvalue(const GramCache& cache, double alpha, std::size_t limit) {
    check_alpha(alpha);
    const std::size_t n = cache.n();
    if (n < 2) throw InvalidArgument("exact_pvalue needs n >= 2");
    if (n > limit || n >= 63)
        throw LimitExceeded("exact enumeration refused: n = " + std::to_string(n) +
                            " exceeds the enumeration limit of " + std::to_string(limit));
    const PairContrast contrast(cache);
    const double observed = zeta_hat(contrast);

    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<double> signs(n);
    std::vector<double> values(total);
    std::uint64_t hits = 0;
    for (std::uint64_t m = 0; m < total; ++m) {
        for (std::size_t i = 0; i < n; ++i) signs[i] = ((m >> i) & 1u) ? 1.0 : -1.0;
        values[m] = resample_statistic(contrast, signs);
        if (values[m] >= observed) ++hits;
    }

    TestOutcome out;
    out.statistic = observed;
    out.p_value = static_cast<double>(hits) / static_cast<double>(total);
    out.method = Method::exact;
    out.B = 0;
    out.alpha = alpha;
    out.reject = out.p_value < alpha;
    out.c_alpha_bound = cutoff_bound(alpha, n);
    out.n = n;
    out.d = cache.d();
    out.resample_quantile = empirical_quantile(values, alpha);
    return out;
}

TestOutcome mc_pvalue(const GramCache& cache, std::size_t B, RngStream& rng, double alpha) {
    check_alpha(alpha);
    if (B < 1) throw InvalidArgument("B must be at least 1");
    const std::size_t n = cache.n();
    if (n < 2) throw InvalidArgument("mc_pvalue needs n >= 2");
    const PairContrast contrast(cache);
    const double observed = zeta_hat(contrast);
    const auto values = mc_resamples(contrast, B, rng);

    TestOutcome out;
    out.statistic = observed;
    out.p_value = pvalue_from_resamples(observed, values);
    out.method = Method::monte_carlo;
    out.B = B;
    out.alpha = alpha;
    out.reject = out.p_value < alpha;
    out.c_alpha_bound = cutoff_bound(alpha, n);
    out.seed = rng.seed();
    out.n = n;
    out.d = cache.d();
    out.resample_quantile = empirical_quantile(values, alpha);
    return out;
}

double critical_value(const GramCache& cache, double alpha, std::size_t B, RngStream& rng) {
    check_alpha(alpha);
    if (B < 1) throw InvalidArgument("B must be at least 1");
    if (cache.n() < 2) throw InvalidArgument("critical_value needs n >= 2");
    const PairContrast contrast(cache);
    return empirical_quantile(mc_resamples(contrast, B, rng), alpha);
}

TestOutcome run_test(const Sample& sample, const TestOptions& options, RngStream& rng) {
    check_alpha(options.alpha);
    if (sample.n() < 2) throw InvalidArgument("run_test needs n >= 2");
    if (!options.exact && options.B < 1) throw InvalidArgument("B must be at least 1");

    const Sample centered = center(sample, options.center);
    const AugmentedSample aug = augment(centered, rng);
    const GramCache cache = build_gram(aug);

    TestOutcome out = options.exact ? exact_pvalue(cache, options.alpha, options.exact_limit)
                                    : mc_pvalue(cache, options.B, rng, options.alpha);
    out.seed = rng.seed();
    out.center = options.center;
    return out;
}

}  // namespace sphsym
