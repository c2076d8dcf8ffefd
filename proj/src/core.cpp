#include "sphsym/core.hpp"

#include <cmath>
#include <string>

#include "sphsym/error.hpp"

namespace sphsym {

namespace {

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = x[k] - y[k];
        s += diff * diff;
    }
    return s;
}

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace

Sample::Sample(std::vector<double> data, std::size_t n, std::size_t d)
    : data_(std::move(data)), n_(n), d_(d) {
    if (n < 1 || d < 1) throw InvalidArgument("sample needs n >= 1 and d >= 1");
    if (data_.size() != n * d)
        throw InvalidArgument("sample data has " + std::to_string(data_.size()) +
                              " entries, expected " + std::to_string(n * d));
    for (std::size_t k = 0; k < data_.size(); ++k)
        if (!std::isfinite(data_[k]))
            throw InvalidArgument("non-finite entry at row " + std::to_string(k / d + 1) +
                                  ", column " + std::to_string(k % d + 1));
}

AugmentedSample::AugmentedSample(Sample original, Sample variant)
    : original_(std::move(original)), variant_(std::move(variant)) {
    if (original_.n() != variant_.n() || original_.d() != variant_.d())
        throw InvalidArgument("original and variant shapes differ");
    for (std::size_t i = 0; i < original_.n(); ++i) {
        const double a = norm(original_.row(i));
        const double b = norm(variant_.row(i));
        if (std::abs(a - b) > 1e-9 * std::max(a, 1e-300) && !(a == 0.0 && b == 0.0))
            throw InvalidArgument("variant row " + std::to_string(i + 1) +
                                  " does not preserve the norm of its original");
    }
}

double kernel(std::span<const double> x, std::span<const double> y, std::size_t d) {
    if (d < 1 || x.size() != d || y.size() != d)
        throw InvalidArgument("kernel: vectors must both have length d");
    return std::exp(-squared_distance(x, y) / (2.0 * static_cast<double>(d)));
}

double symmetrized_kernel(const ObservationPair& p1, const ObservationPair& p2, std::size_t d) {
    const double same = kernel(p1.x, p2.x, d) + kernel(p1.x_variant, p2.x_variant, d);
    const double cross = kernel(p1.x, p2.x_variant, d) + kernel(p2.x, p1.x_variant, d);
    return same - cross;
}

GramCache build_gram(const AugmentedSample& aug) {
    GramCache cache;
    const std::size_t n = aug.n();
    const std::size_t d = aug.d();
    const std::size_t m = 2 * n;
    cache.n_ = n;
    cache.d_ = d;
    cache.k_.assign(m * m, 1.0);

    auto z = [&](std::size_t a) {
        return a < n ? aug.original().row(a) : aug.variant().row(a - n);
    };
    const double scale = 2.0 * static_cast<double>(d);
    for (std::size_t a = 0; a < m; ++a) {
        const auto za = z(a);
        for (std::size_t b = a + 1; b < m; ++b) {
            const double v = std::exp(-squared_distance(za, z(b)) / scale);
            cache.k_[a * m + b] = v;
            cache.k_[b * m + a] = v;
        }
    }
    cache.evaluations_ = m * (m - 1) / 2;
    return cache;
}

double cached_pair_term(const GramCache& k, std::size_t i, std::size_t j) {
    const std::size_t n = k.n();
    return (k(i, j) + k(n + i, n + j)) - (k(i, n + j) + k(j, n + i));
}

PairContrast::PairContrast(const GramCache& cache) : n_(cache.n()), g_(n_ * n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double v = cached_pair_term(cache, i, j);
            g_[i * n_ + j] = v;
            g_[j * n_ + i] = v;
        }
}

ZetaEstimate zeta_hat(const AugmentedSample& aug, const GramCache& cache) {
    if (aug.n() < 2) throw InvalidArgument("zeta_hat needs n >= 2");
    if (cache.n() != aug.n() || cache.d() != aug.d())
        throw InvalidArgument("gram cache was not built from this sample");
    const double total = upper_pair_sum(
        aug.n(), [&](std::size_t i, std::size_t j) { return cached_pair_term(cache, i, j); });
    return {total / pair_count(aug.n())};
}

double zeta_hat(const PairContrast& contrast) {
    if (contrast.n() < 2) throw InvalidArgument("zeta_hat needs n >= 2");
    const double total =
        upper_pair_sum(contrast.n(), [&](std::size_t i, std::size_t j) { return contrast(i, j); });
    return total / pair_count(contrast.n());
}

}  // namespace sphsym
