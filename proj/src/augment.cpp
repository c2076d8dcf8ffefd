#include "sphsym/augment.hpp"

#include <cmath>
#include <string>

#include "sphsym/error.hpp"

namespace sphsym {

std::vector<double> sample_unit_sphere(std::size_t d, RngStream& rng) {
    if (d < 1) throw InvalidArgument("sample_unit_sphere needs d >= 1");
    std::vector<double> u(d);
    for (;;) {
        double s = 0.0;
        for (auto& v : u) {
            v = rng.normal();
            s += v * v;
        }
        const double r = std::sqrt(s);
        if (r < 1e-300) continue;
        for (auto& v : u) v /= r;
        return u;
    }
}

AugmentedSample augment(const Sample& sample, RngStream& rng) {
    const std::size_t n = sample.n();
    const std::size_t d = sample.d();
    std::vector<double> variant(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = sample.row(i);
        double s = 0.0;
        for (double v : x) s += v * v;
        const double r = std::sqrt(s);
        const auto u = sample_unit_sphere(d, rng);
        for (std::size_t k = 0; k < d; ++k) variant[i * d + k] = r * u[k];
    }
    return AugmentedSample(sample, Sample(std::move(variant), n, d));
}

namespace {

constexpr double anchor_radius = 1e-12;

double objective(const Sample& s, const std::vector<double>& theta) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
        const auto x = s.row(i);
        double q = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) q += (x[k] - theta[k]) * (x[k] - theta[k]);
        total += std::sqrt(q);
    }
    return total;
}

struct WeiszfeldStep {
    std::vector<double> next;
    double residual = 0.0;  // subgradient-based optimality residual at theta
    bool optimal = false;
};

WeiszfeldStep weiszfeld_step(const Sample& s, const std::vector<double>& theta, double tol) {
    const std::size_t d = s.d();
    std::vector<double> weighted(d, 0.0);
    std::vector<double> pull(d, 0.0);
    double weight_sum = 0.0;
    std::size_t coincident = 0;
    for (std::size_t i = 0; i < s.n(); ++i) {
        const auto x = s.row(i);
        double q = 0.0;
        for (std::size_t k = 0; k < d; ++k) q += (x[k] - theta[k]) * (x[k] - theta[k]);
        const double dist = std::sqrt(q);
        if (dist < anchor_radius) {
            ++coincident;
            continue;
        }
        const double w = 1.0 / dist;
        weight_sum += w;
        for (std::size_t k = 0; k < d; ++k) {
            weighted[k] += w * x[k];
            pull[k] += w * (x[k] - theta[k]);
        }
    }

    WeiszfeldStep step;
    if (weight_sum == 0.0) {  // every point sits on theta
        step.next = theta;
        step.optimal = true;
        return step;
    }
    double r = 0.0;
    for (double v : pull) r += v * v;
    r = std::sqrt(r);
    const double eta = static_cast<double>(coincident);
    step.residual = std::max(0.0, r - eta);
    step.optimal = coincident > 0 ? r <= eta : r <= tol;

    step.next.resize(d);
    if (coincident == 0) {
        for (std::size_t k = 0; k < d; ++k) step.next[k] = weighted[k] / weight_sum;
    } else {
        // Vardi-Zhang: blend the Weiszfeld map with the current anchor.
        const double keep = std::min(1.0, eta / r);
        for (std::size_t k = 0; k < d; ++k)
            step.next[k] = (1.0 - keep) * (weighted[k] / weight_sum) + keep * theta[k];
    }
    return step;
}

}  // namespace

SpatialMedian spatial_median(const Sample& sample, const WeiszfeldOptions& options) {
    if (!(options.tol > 0.0)) throw InvalidArgument("spatial_median needs tol > 0");
    const std::size_t n = sample.n();
    const std::size_t d = sample.d();

    std::vector<double> theta(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) theta[k] += sample.row(i)[k];
    for (auto& v : theta) v /= static_cast<double>(n);

    SpatialMedian result;
    double current = objective(sample, theta);
    if (options.record_objective) result.objective.push_back(current);
    std::vector<double> best = theta;
    double best_value = current;

    for (std::size_t it = 0; it < options.max_iter; ++it) {
        auto step = weiszfeld_step(sample, theta, options.tol);
        result.gradient_norm = step.residual;
        if (step.optimal) {
            result.converged = true;
            break;
        }
        double moved = 0.0;
        for (std::size_t k = 0; k < d; ++k)
            moved += (step.next[k] - theta[k]) * (step.next[k] - theta[k]);
        moved = std::sqrt(moved);
        theta = std::move(step.next);
        current = objective(sample, theta);
        ++result.iterations;
        if (options.record_objective) result.objective.push_back(current);
        if (current <= best_value) {
            best = theta;
            best_value = current;
        }
        if (moved <= options.tol) {
            result.converged = true;
            result.gradient_norm = weiszfeld_step(sample, theta, options.tol).residual;
            break;
        }
    }
    result.point = std::move(best);
    return result;
}

std::string_view to_string(CenterMode mode) {
    return mode == CenterMode::none ? "none" : "spatial-median";
}

CenterMode parse_center_mode(std::string_view text) {
    if (text == "none") return CenterMode::none;
    if (text == "spatial-median") return CenterMode::spatial_median;
    throw InvalidArgument("unknown center mode '" + std::string(text) +
                          "' (expected none or spatial-median)");
}

Sample center(const Sample& sample, CenterMode mode, const WeiszfeldOptions& options,
              SpatialMedian* median_out) {
    if (mode == CenterMode::none) return sample;
    auto median = spatial_median(sample, options);
    const std::size_t d = sample.d();
    std::vector<double> data(sample.data().begin(), sample.data().end());
    for (std::size_t i = 0; i < sample.n(); ++i)
        for (std::size_t k = 0; k < d; ++k) data[i * d + k] -= median.point[k];
    if (median_out) *median_out = std::move(median);
    return Sample(std::move(data), sample.n(), d);
}

}  // namespace sphsym
