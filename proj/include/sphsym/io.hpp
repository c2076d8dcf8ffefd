#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sphsym/calibrate.hpp"
#include "sphsym/core.hpp"

namespace sphsym {

/// Comma-separated numeric rows. Blank lines are skipped; every other row
/// must have the same field count. Errors carry the 1-based line number.
std::vector<std::vector<double>> read_csv_rows(const std::string& path, bool has_header);

Sample read_csv_sample(const std::string& path, bool has_header);

void write_csv_sample(const Sample& sample, const std::string& path);

/// {statistic, p_value, method, B, alpha, reject, n, d, seed, center, c_alpha_bound}
nlohmann::json to_json(const TestOutcome& outcome);

}  // namespace sphsym
