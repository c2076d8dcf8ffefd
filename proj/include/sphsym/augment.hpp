#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "sphsym/core.hpp"
#include "sphsym/rng.hpp"

namespace sphsym {

/// Uniform draw on S^{d-1}: d standard normals, normalized. Draws with norm
/// below 1e-300 are redrawn.
std::vector<double> sample_unit_sphere(std::size_t d, RngStream& rng);

/// Pairs every row with |X_i| U_i, one independent U_i per row in row order.
AugmentedSample augment(const Sample& sample, RngStream& rng);

struct WeiszfeldOptions {
    double tol = 1e-8;
    std::size_t max_iter = 10000;
    bool record_objective = false;
};

struct SpatialMedian {
    std::vector<double> point;
    std::size_t iterations = 0;
    bool converged = false;
    /// Norm of the (sub)gradient residual at the returned point.
    double gradient_norm = 0.0;
    /// Objective sum_i |X_i - theta_k| for k = 0..iterations when requested.
    std::vector<double> objective;
};

/// Weiszfeld iteration with the Vardi-Zhang step at data points, started
/// from the coordinate-wise mean. Stops when the gradient norm or the step
/// length falls below tol; otherwise reports converged = false with the
/// best iterate.
SpatialMedian spatial_median(const Sample& sample, const WeiszfeldOptions& options = {});

enum class CenterMode { none, spatial_median };

std::string_view to_string(CenterMode mode);
/// Accepts "none" and "spatial-median".
CenterMode parse_center_mode(std::string_view text);

/// Subtracts the spatial median from every row (mode none: returns a copy).
Sample center(const Sample& sample, CenterMode mode, const WeiszfeldOptions& options = {},
              SpatialMedian* median_out = nullptr);

}  // namespace sphsym
