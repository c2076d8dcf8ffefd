#include "sphsym/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "sphsym/calibrate.hpp"
#include "sphsym/error.hpp"

namespace sphsym {

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_top_level(std::string_view s) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.push_back(trim(s.substr(start)));
    return out;
}

template <class T>
T parse_scalar(const std::string& key, const std::string& text) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ConfigError(key, "cannot parse '" + text + "'");
    return v;
}

std::vector<std::size_t> parse_counts(const std::string& key, const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : split_top_level(text)) out.push_back(parse_scalar<std::size_t>(key, item));
    return out;
}

GridCell make_cell(const std::string& key, const std::string& descriptor, std::size_t n,
                   std::size_t d) {
    if (n < 2) throw ConfigError(key, "sample size must be at least 2");
    if (d < 1) throw ConfigError(key, "dimension must be at least 1");
    try {
        auto spec = parse_distribution(descriptor, d);
        return {spec, format_distribution(spec), n, d};
    } catch (const std::exception& e) {
        throw ConfigError(key, e.what());
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, std::string> scalars;
    std::vector<std::string> cells;
    static const std::set<std::string> known{"name",   "replications", "R",      "B",
                                             "alpha",  "seed",         "center", "output",
                                             "distributions", "n",     "d",      "cell"};

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(body, "expected 'key = value'");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (!known.count(key)) throw ConfigError(key, "unknown key");
        if (key == "R") key = "replications";
        if (key == "cell") {
            cells.push_back(value);
            continue;
        }
        if (!scalars.emplace(key, value).second) throw ConfigError(key, "given more than once");
    }

    auto get = [&](const std::string& key) -> const std::string* {
        auto it = scalars.find(key);
        return it == scalars.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("name"); v && !v->empty())
        cfg.name = *v;
    else
        throw ConfigError("name", "required");
    cfg.output = get("output") ? *get("output") : cfg.name;
    if (const auto* v = get("replications")) {
        cfg.replications = parse_scalar<std::size_t>("replications", *v);
        if (cfg.replications < 1) throw ConfigError("replications", "must be at least 1");
    }
    if (const auto* v = get("B")) {
        cfg.B = parse_scalar<std::size_t>("B", *v);
        if (cfg.B < 1) throw ConfigError("B", "must be at least 1");
    }
    if (const auto* v = get("alpha")) {
        cfg.alpha = parse_scalar<double>("alpha", *v);
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
    }
    if (const auto* v = get("seed")) cfg.seed = parse_scalar<std::uint64_t>("seed", *v);
    if (const auto* v = get("center")) {
        try {
            cfg.center = parse_center_mode(*v);
        } catch (const std::exception& e) {
            throw ConfigError("center", e.what());
        }
    }

    const auto* dists = get("distributions");
    const auto* ns = get("n");
    const auto* ds = get("d");
    if (dists || ns || ds) {
        if (!dists) throw ConfigError("distributions", "required when n or d is given");
        if (!ns) throw ConfigError("n", "required when distributions is given");
        if (!ds) throw ConfigError("d", "required when distributions is given");
        const auto n_values = parse_counts("n", *ns);
        const auto d_values = parse_counts("d", *ds);
        for (const auto& desc : split_top_level(*dists)) {
            if (desc.empty()) throw ConfigError("distributions", "empty entry");
            for (auto d : d_values)
                for (auto n : n_values) cfg.grid.push_back(make_cell("distributions", desc, n, d));
        }
    }
    for (const auto& c : cells) {
        const auto parts = split_top_level(c);
        if (parts.size() != 3) throw ConfigError("cell", "expected 'n, d, descriptor'");
        cfg.grid.push_back(make_cell("cell", parts[2], parse_scalar<std::size_t>("cell", parts[0]),
                                     parse_scalar<std::size_t>("cell", parts[1])));
    }
    if (cfg.grid.empty()) throw ConfigError("grid", "no cells (give distributions/n/d or cell)");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

// ---------------------------------------------------------------------------
// Studies

std::uint64_t replication_stream(std::size_t cell, std::size_t replication) {
    return (static_cast<std::uint64_t>(cell) << 32) | static_cast<std::uint64_t>(replication);
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

struct CellJob {
    std::string spec;
    std::size_t n;
    std::size_t d;
    // Produces the sample for one replication from its stream.
    std::function<Sample(RngStream&)> draw;
};

std::vector<PowerRecord> run_cells(const std::vector<CellJob>& cells, std::size_t replications,
                                   const TestOptions& options, std::uint64_t seed,
                                   unsigned threads) {
    const std::size_t total = cells.size() * replications;
    std::vector<std::uint8_t> rejected(total, 0);
    std::vector<std::string> errors(total);

    parallel_for(total, threads, [&](std::size_t task) {
        const std::size_t c = task / replications;
        const std::size_t r = task % replications;
        try {
            RngStream rng(seed, replication_stream(c, r));
            const Sample x = cells[c].draw(rng);
            rejected[task] = run_test(x, options, rng).reject ? 1 : 0;
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
    });

    std::vector<PowerRecord> records;
    records.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        PowerRecord rec;
        rec.spec = cells[c].spec;
        rec.n = cells[c].n;
        rec.d = cells[c].d;
        rec.replications = replications;
        for (std::size_t r = 0; r < replications; ++r) {
            const std::size_t task = c * replications + r;
            if (!errors[task].empty()) {
                rec.error = "replication " + std::to_string(r) + ": " + errors[task];
                break;
            }
            rec.rejections += rejected[task];
        }
        if (rec.error) {
            rec.rejections = 0;
        } else {
            rec.power = static_cast<double>(rec.rejections) / static_cast<double>(replications);
            rec.standard_error = power_standard_error(rec.power, replications);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

nlohmann::json config_echo(const ExperimentConfig& cfg) {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& c : cfg.grid) grid.push_back({{"spec", c.descriptor}, {"n", c.n}, {"d", c.d}});
    return {{"name", cfg.name},     {"replications", cfg.replications},
            {"B", cfg.B},           {"alpha", cfg.alpha},
            {"seed", cfg.seed},     {"center", std::string(to_string(cfg.center))},
            {"output", cfg.output}, {"grid", grid}};
}

}  // namespace

StudyResult run_power_study(const ExperimentConfig& config, unsigned threads) {
    if (config.grid.empty()) throw InvalidArgument("experiment grid is empty");
    if (config.replications < 1) throw InvalidArgument("replications must be at least 1");
    std::vector<CellJob> cells;
    for (const auto& cell : config.grid) {
        const auto* spec = &cell.spec;
        const std::size_t n = cell.n;
        cells.push_back({cell.descriptor, cell.n, cell.d,
                         [spec, n](RngStream& rng) { return sample(*spec, n, rng); }});
    }
    TestOptions options;
    options.alpha = config.alpha;
    options.B = config.B;
    options.center = config.center;

    StudyResult result;
    result.name = config.name;
    result.replications = config.replications;
    result.B = config.B;
    result.alpha = config.alpha;
    result.seed = config.seed;
    result.center = config.center;
    result.config = config_echo(config);
    result.records = run_cells(cells, config.replications, options, config.seed, threads);
    return result;
}

StudyResult run_pitman_study(const PitmanOptions& opt, unsigned threads) {
    if (opt.n_grid.empty()) throw InvalidArgument("pitman study needs a non-empty n grid");
    ExperimentConfig cfg;
    cfg.name = "pitman_gamma=" + format_number(opt.gamma);
    cfg.replications = opt.replications;
    cfg.B = opt.B;
    cfg.alpha = opt.alpha;
    cfg.seed = opt.seed;
    cfg.output = cfg.name;
    for (auto n : opt.n_grid) {
        if (n < 2) throw InvalidArgument("pitman study needs n >= 2");
        auto spec = make_pitman(opt.d, opt.gamma, opt.scale);
        std::get<ContaminatedFamily>(spec.family).delta_for(n);  // validates the weight
        cfg.grid.push_back({spec, format_distribution(spec), n, opt.d});
    }
    return run_power_study(cfg, threads);
}

StudyResult run_subsample_study(const Sample& data, const SubsampleOptions& opt,
                                unsigned threads) {
    if (opt.sizes.empty()) throw InvalidArgument("subsample study needs at least one size");
    if (opt.replications < 1) throw InvalidArgument("replications must be at least 1");
    for (auto m : opt.sizes) {
        if (m < 2) throw InvalidArgument("subsample size must be at least 2");
        if (m > data.n())
            throw InvalidArgument("subsample size " + std::to_string(m) + " exceeds the " +
                                  std::to_string(data.n()) + " available rows");
    }
    const std::string spec = "subsample(" + opt.label + ")";
    std::vector<CellJob> cells;
    for (auto m : opt.sizes) {
        cells.push_back({spec, m, data.d(), [&data, m](RngStream& rng) {
                             // Partial Fisher-Yates: first m entries of a random permutation.
                             std::vector<std::size_t> index(data.n());
                             for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
                             for (std::size_t i = 0; i < m; ++i)
                                 std::swap(index[i], index[i + rng.below(index.size() - i)]);
                             std::vector<double> rows;
                             rows.reserve(m * data.d());
                             for (std::size_t i = 0; i < m; ++i) {
                                 const auto r = data.row(index[i]);
                                 rows.insert(rows.end(), r.begin(), r.end());
                             }
                             return Sample(std::move(rows), m, data.d());
                         }});
    }
    TestOptions options;
    options.alpha = opt.alpha;
    options.B = opt.B;
    options.center = opt.center;

    StudyResult result;
    result.name = "subsample_" + opt.label;
    result.replications = opt.replications;
    result.B = opt.B;
    result.alpha = opt.alpha;
    result.seed = opt.seed;
    result.center = opt.center;
    result.config = {{"name", result.name},
                     {"input", opt.label},
                     {"rows", data.n()},
                     {"d", data.d()},
                     {"sizes", opt.sizes},
                     {"replications", opt.replications},
                     {"B", opt.B},
                     {"alpha", opt.alpha},
                     {"seed", opt.seed},
                     {"center", std::string(to_string(opt.center))}};
    result.records = run_cells(cells, opt.replications, options, opt.seed, threads);
    return result;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string records_csv(const StudyResult& result) {
    std::string out = "name,spec,n,d,R,B,alpha,rejections,power,std_error,seed\n";
    for (const auto& r : result.records) {
        out += csv_quote(result.name) + ',' + csv_quote(r.spec) + ',' + std::to_string(r.n) + ',' +
               std::to_string(r.d) + ',' + std::to_string(r.replications) + ',' +
               std::to_string(result.B) + ',' + format_number(result.alpha) + ',' +
               std::to_string(r.rejections) + ',' + (r.error ? "nan" : format_number(r.power)) +
               ',' + (r.error ? "nan" : format_number(r.standard_error)) + ',' +
               std::to_string(result.seed) + '\n';
    }
    return out;
}

nlohmann::json records_json(const StudyResult& result) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : result.records) {
        nlohmann::json j = {{"spec", r.spec},
                            {"n", r.n},
                            {"d", r.d},
                            {"R", r.replications},
                            {"rejections", r.rejections},
                            {"power", r.error ? nlohmann::json() : nlohmann::json(r.power)},
                            {"std_error",
                             r.error ? nlohmann::json() : nlohmann::json(r.standard_error)}};
        if (r.error) j["error"] = *r.error;
        records.push_back(std::move(j));
    }
    return {{"name", result.name},
            {"R", result.replications},
            {"B", result.B},
            {"alpha", result.alpha},
            {"seed", result.seed},
            {"center", std::string(to_string(result.center))},
            {"config", result.config},
            {"records", records}};
}

void write_study(const StudyResult& result, const std::string& stem) {
    const std::filesystem::path base(stem);
    if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
    {
        std::ofstream out(stem + ".csv", std::ios::binary);
        if (!out) throw IoError("cannot write '" + stem + ".csv'");
        out << records_csv(result);
        if (!out) throw IoError("write error on '" + stem + ".csv'");
    }
    std::ofstream out(stem + ".json", std::ios::binary);
    if (!out) throw IoError("cannot write '" + stem + ".json'");
    out << records_json(result).dump(2) << '\n';
    if (!out) throw IoError("write error on '" + stem + ".json'");
}

}  // namespace sphsym
