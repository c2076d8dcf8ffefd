#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sphsym/error.hpp"
#include "sphsym/experiments.hpp"
#include "sphsym/io.hpp"

using namespace sphsym;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config_error_key(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

}  // namespace

TEST(Config, ProductGridAndScalars) {
    const auto cfg = parse_config(R"(
# comment line
name = demo
R = 7            # alias
B = 99
alpha = 0.1
seed = 5
center = spatial-median
output = out/demo
distributions = gaussian(rho=0.5), t(nu=4)
n = 20, 40
d = 2, 3
cell = 23, 5, lp(p=inf)
)");
    EXPECT_EQ(cfg.name, "demo");
    EXPECT_EQ(cfg.replications, 7u);
    EXPECT_EQ(cfg.B, 99u);
    EXPECT_EQ(cfg.alpha, 0.1);
    EXPECT_EQ(cfg.seed, 5u);
    EXPECT_EQ(cfg.center, CenterMode::spatial_median);
    EXPECT_EQ(cfg.output, "out/demo");
    ASSERT_EQ(cfg.grid.size(), 9u);
    EXPECT_EQ(cfg.grid[0].descriptor, "gaussian(rho=0.5)");
    EXPECT_EQ(cfg.grid[0].n, 20u);
    EXPECT_EQ(cfg.grid[0].d, 2u);
    EXPECT_EQ(cfg.grid[1].n, 40u);
    EXPECT_EQ(cfg.grid[8].descriptor, "lp(p=inf)");
    EXPECT_EQ(cfg.grid[8].n, 23u);
    EXPECT_EQ(cfg.grid[8].d, 5u);
}

TEST(Config, Defaults) {
    const auto cfg = parse_config("name = x\ncell = 10, 2, gaussian\n");
    EXPECT_EQ(cfg.replications, 200u);
    EXPECT_EQ(cfg.B, 500u);
    EXPECT_EQ(cfg.alpha, 0.05);
    EXPECT_EQ(cfg.center, CenterMode::none);
    EXPECT_EQ(cfg.output, "x");
}

TEST(Config, ErrorsNameTheOffendingKey) {
    EXPECT_EQ(config_error_key("name = x\nbogus = 1\ncell = 10, 2, gaussian\n"), "bogus");
    EXPECT_EQ(config_error_key("name = x\nB = 1\nB = 2\ncell = 10, 2, gaussian\n"), "B");
    EXPECT_EQ(config_error_key("name = x\nalpha = 1.5\ncell = 10, 2, gaussian\n"), "alpha");
    EXPECT_EQ(config_error_key("name = x\nB = lots\ncell = 10, 2, gaussian\n"), "B");
    EXPECT_EQ(config_error_key("name = x\ncenter = mean\ncell = 10, 2, gaussian\n"), "center");
    EXPECT_EQ(config_error_key("name = x\ndistributions = gaussian\nn = 10\n"), "d");
    EXPECT_EQ(config_error_key("name = x\ndistributions = weibull\nn = 10\nd = 2\n"), "distributions");
    EXPECT_EQ(config_error_key("name = x\ncell = 10, gaussian\n"), "cell");
    EXPECT_EQ(config_error_key("name = x\ncell = 1, 2, gaussian\n"), "cell");
    EXPECT_EQ(config_error_key("B = 5\ncell = 10, 2, gaussian\n"), "name");
    EXPECT_EQ(config_error_key("name = x\nB = 10\n"), "grid");
    EXPECT_EQ(config_error_key("name = x\njust text\n"), "just text");
}

TEST(Config, LoadMissingFile) {
    EXPECT_THROW(load_config("/nonexistent/x.cfg"), IoError);
}

TEST(PowerStudy, SingleReplicationSmoke) {
    auto cfg = parse_config("name = smoke\nR = 1\ncell = 20, 3, gaussian\n");
    const auto result = run_power_study(cfg, 1);
    ASSERT_EQ(result.records.size(), 1u);
    const auto& r = result.records[0];
    EXPECT_EQ(r.replications, 1u);
    EXPECT_TRUE(r.power == 0.0 || r.power == 1.0);
    EXPECT_EQ(r.rejections, static_cast<std::size_t>(r.power));
}

TEST(PowerStudy, LevelCellAtDimension32) {
    auto cfg = parse_config("name = level\nR = 500\nseed = 31\ncell = 20, 32, gaussian\n");
    const auto r = run_power_study(cfg).records.at(0);
    EXPECT_NEAR(r.power, 0.05, 0.03);
}

TEST(PowerStudy, StrongEquicorrelationHasHighPower) {
    auto cfg = parse_config("name = e2a\nR = 200\nseed = 32\ncell = 100, 5, gaussian(rho=0.9)\n");
    EXPECT_GE(run_power_study(cfg).records.at(0).power, 0.95);
}

TEST(PowerStudy, MonotoneInCorrelation) {
    auto cfg = parse_config(
        "name = mono\nR = 200\nseed = 33\n"
        "distributions = gaussian, gaussian(rho=0.3), gaussian(rho=0.5), gaussian(rho=0.9)\n"
        "n = 100\nd = 5\n");
    const auto records = run_power_study(cfg).records;
    ASSERT_EQ(records.size(), 4u);
    for (std::size_t k = 1; k < records.size(); ++k) {
        const double se = std::hypot(records[k].standard_error, records[k - 1].standard_error);
        EXPECT_GE(records[k].power, records[k - 1].power - 2 * se);
    }
}

TEST(PowerStudy, StandardErrorRecomputable) {
    auto cfg = parse_config("name = se\nR = 40\ndistributions = gaussian(rho=0.5)\nn = 30, 60\nd = 4\n");
    for (const auto& r : run_power_study(cfg).records) {
        EXPECT_EQ(r.power, static_cast<double>(r.rejections) / r.replications);
        EXPECT_EQ(r.standard_error, power_standard_error(r.power, r.replications));
    }
}

TEST(PowerStudy, IndependentOfThreadCount) {
    auto cfg = parse_config(
        "name = threads\nR = 30\ndistributions = gaussian(rho=0.4), mixture4\nn = 20, 35\nd = 5\n");
    const auto a = run_power_study(cfg, 1), b = run_power_study(cfg, 4);
    EXPECT_EQ(records_csv(a), records_csv(b));
    EXPECT_EQ(records_json(a), records_json(b));
}

TEST(PowerStudy, CellFailureIsRecorded) {
    // w_n = 5 n^0.1 / sqrt(n) exceeds one at n = 10
    ExperimentConfig cfg;
    cfg.name = "bad";
    cfg.replications = 3;
    const auto spec = make_pitman(4, 0.1);
    cfg.grid.push_back({spec, format_distribution(spec), 10, 4});
    cfg.grid.push_back({make_gaussian(4), "gaussian", 10, 4});
    const auto result = run_power_study(cfg, 1);
    ASSERT_EQ(result.records.size(), 2u);
    EXPECT_TRUE(result.records[0].error.has_value());
    EXPECT_FALSE(result.records[1].error.has_value());
}

TEST(PitmanStudy, ValidatesWeights) {
    PitmanOptions opt;
    opt.gamma = 0.1;
    opt.n_grid = {10};
    EXPECT_THROW(run_pitman_study(opt), InvalidArgument);
}

TEST(PitmanStudy, RecordsPerSampleSize) {
    PitmanOptions opt;
    opt.gamma = 0.0;
    opt.n_grid = {50, 100};
    opt.replications = 20;
    const auto result = run_pitman_study(opt);
    ASSERT_EQ(result.records.size(), 2u);
    EXPECT_EQ(result.records[0].spec, "pitman(gamma=0)");
    EXPECT_EQ(result.records[1].n, 100u);
    EXPECT_EQ(result.records[1].d, 10u);
}

TEST(SubsampleStudy, FullNonSphericalDatasetRejects) {
    RngStream rng(40);
    const auto data = sample(make_mixture(), 150, rng);
    SubsampleOptions opt;
    opt.sizes = {150};
    opt.replications = 1;
    opt.label = "mixture";
    const auto r = run_subsample_study(data, opt).records.at(0);
    EXPECT_EQ(r.rejections, 1u);
    EXPECT_EQ(r.spec, "subsample(mixture)");
}

TEST(SubsampleStudy, SphericalDataKeepsLevel) {
    RngStream rng(41);
    const auto data = sample(make_gaussian(4), 400, rng);
    SubsampleOptions opt;
    opt.sizes = {40};
    opt.replications = 200;
    opt.center = CenterMode::none;
    EXPECT_LE(run_subsample_study(data, opt).records.at(0).power, 0.08);
}

TEST(SubsampleStudy, RejectsOversizedSubsample) {
    RngStream rng(42);
    const auto data = sample(make_gaussian(2), 10, rng);
    SubsampleOptions opt;
    opt.sizes = {11};
    EXPECT_THROW(run_subsample_study(data, opt), InvalidArgument);
}

TEST(Output, DeterministicFileBytes) {
    RngStream rng(43);
    const auto data = sample(make_angular(), 120, rng);
    SubsampleOptions opt;
    opt.sizes = {30, 60};
    opt.replications = 25;
    const auto dir = fs::temp_directory_path() / "sphsym_exp_out";
    fs::remove_all(dir);
    write_study(run_subsample_study(data, opt, 1), (dir / "a").string());
    write_study(run_subsample_study(data, opt, 3), (dir / "nested" / "b").string());
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "nested" / "b.csv"));
    EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "nested" / "b.json"));

    const auto csv = slurp(dir / "a.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,spec,n,d,R,B,alpha,rejections,power,std_error,seed");
    const auto json = nlohmann::json::parse(slurp(dir / "a.json"));
    EXPECT_EQ(json["records"].size(), 2u);
    EXPECT_EQ(json["config"]["sizes"], (std::vector<int>{30, 60}));
}
