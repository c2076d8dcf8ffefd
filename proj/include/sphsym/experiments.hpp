#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sphsym/augment.hpp"
#include "sphsym/core.hpp"
#include "sphsym/distributions.hpp"

namespace sphsym {

struct GridCell {
    DistributionSpec spec;
    std::string descriptor;
    std::size_t n = 0;
    std::size_t d = 0;
};

struct ExperimentConfig {
    std::string name;
    std::vector<GridCell> grid;
    std::size_t replications = 200;
    std::size_t B = 500;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    CenterMode center = CenterMode::none;
    /// Output stem; results go to <output>.csv and <output>.json.
    std::string output;
};

/// Parses the key = value experiment format:
///
///   name = level_example1a
///   replications = 500          # alias R
///   B = 500
///   alpha = 0.05
///   seed = 2024
///   center = none               # or spatial-median
///   output = results/level_example1a
///   distributions = gaussian, cauchy, t(nu=4)   # product grid with n and d
///   n = 20, 40
///   d = 2, 32
///   cell = 23, 2, spiked(gamma=0.5)             # explicit n, d, descriptor
///
/// Lists split on commas outside brackets. Throws ConfigError naming the
/// offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct PowerRecord {
    std::string spec;
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t rejections = 0;
    std::size_t replications = 0;
    double power = 0.0;
    double standard_error = 0.0;
    std::optional<std::string> error;
};

inline double power_standard_error(double power, std::size_t replications) {
    return std::sqrt(power * (1.0 - power) / static_cast<double>(replications));
}

struct StudyResult {
    std::string name;
    std::size_t replications = 0;
    std::size_t B = 0;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    CenterMode center = CenterMode::none;
    nlohmann::json config;
    std::vector<PowerRecord> records;
};

/// Per-replication stream: RngStream(seed, cell << 32 | replication).
std::uint64_t replication_stream(std::size_t cell, std::size_t replication);

/// threads = 0 uses the machine's hardware concurrency. Results do not depend
/// on the thread count.
StudyResult run_power_study(const ExperimentConfig& config, unsigned threads = 0);

struct PitmanOptions {
    double gamma = 0.0;
    std::vector<std::size_t> n_grid{50, 100, 250, 500};
    std::size_t replications = 200;
    std::size_t B = 500;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::size_t d = 10;
    double scale = 5.0;
};

/// Power along (1 - w_n) N(0, I) + w_n N(0, 0.5 I + 0.5 J), w_n = 5 n^gamma / sqrt(n).
/// Throws InvalidArgument if w_n leaves [0, 1] anywhere on the grid.
StudyResult run_pitman_study(const PitmanOptions& options, unsigned threads = 0);

struct SubsampleOptions {
    std::vector<std::size_t> sizes;
    std::size_t replications = 200;
    std::size_t B = 500;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    CenterMode center = CenterMode::spatial_median;
    std::string label = "data";
};

/// Each replication draws a subsample without replacement and runs the test
/// on it; centering, when on, is recomputed per subsample.
StudyResult run_subsample_study(const Sample& data, const SubsampleOptions& options,
                                unsigned threads = 0);

/// Columns: name, spec, n, d, R, B, alpha, rejections, power, std_error, seed.
std::string records_csv(const StudyResult& result);
nlohmann::json records_json(const StudyResult& result);
/// Writes <stem>.csv and <stem>.json.
void write_study(const StudyResult& result, const std::string& stem);

}  // namespace sphsym
