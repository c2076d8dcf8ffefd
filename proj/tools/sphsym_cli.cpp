#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphsym/sphsym.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int report(sphsym_status status) {
    std::cerr << "error: " << sphsym_last_error() << '\n';
    switch (status) {
        case SPHSYM_ERR_IO:
        case SPHSYM_ERR_PARSE:
        case SPHSYM_ERR_INTERNAL:
            return kExitRuntime;
        default:
            return kExitUsage;
    }
}

bool parse_center(const std::string& text, sphsym_center* out) {
    if (text == "none") {
        *out = SPHSYM_CENTER_NONE;
        return true;
    }
    if (text == "spatial-median") {
        *out = SPHSYM_CENTER_SPATIAL_MEDIAN;
        return true;
    }
    return false;
}

std::string format_power(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

int print_and_write(sphsym_study study, const std::string& stem) {
    const size_t count = sphsym_study_record_count(study);
    std::printf("%-40s %6s %6s %10s %8s %8s\n", "spec", "n", "d", "rejections", "power", "se");
    for (size_t i = 0; i < count; ++i) {
        sphsym_power_record r{};
        sphsym_study_record(study, i, &r);
        if (r.error) {
            std::printf("%-40s %6zu %6zu  error: %s\n", r.spec, r.n, r.d, r.error);
            continue;
        }
        std::printf("%-40s %6zu %6zu %10zu %8s %8s\n", r.spec, r.n, r.d, r.rejections,
                    format_power(r.power).c_str(), format_power(r.std_error).c_str());
    }
    if (!stem.empty()) {
        if (auto st = sphsym_study_write(study, stem.c_str()); st != SPHSYM_OK) return report(st);
        std::printf("wrote %s.csv and %s.json\n", stem.c_str(), stem.c_str());
    }
    return kExitOk;
}

struct Handle {
    sphsym_study study = nullptr;
    sphsym_sample sample = nullptr;
    sphsym_config config = nullptr;
    sphsym_cov cov = nullptr;
    ~Handle() {
        sphsym_study_destroy(study);
        sphsym_sample_destroy(sample);
        sphsym_config_destroy(config);
        sphsym_cov_destroy(cov);
    }
};

struct TestArgs {
    std::string input;
    bool header = false;
    double alpha = 0.05;
    uint64_t B = 500;
    uint64_t seed = 0;
    std::string center = "none";
    bool exact = false;
    uint64_t exact_limit = 20;
    std::string output;
};

int cmd_test(const TestArgs& a) {
    sphsym_test_options opt;
    sphsym_test_options_init(&opt);
    opt.alpha = a.alpha;
    opt.B = a.B;
    opt.seed = a.seed;
    opt.exact = a.exact ? 1 : 0;
    opt.exact_limit = a.exact_limit;
    parse_center(a.center, &opt.center);

    Handle h;
    if (auto st = sphsym_sample_read_csv(a.input.c_str(), a.header ? 1 : 0, &h.sample);
        st != SPHSYM_OK)
        return report(st);
    sphsym_test_result result{};
    if (auto st = sphsym_run_test(h.sample, &opt, &result); st != SPHSYM_OK) return report(st);

    size_t need = 0;
    sphsym_test_result_json(&result, nullptr, 0, &need);
    std::string json(need, '\0');
    if (auto st = sphsym_test_result_json(&result, json.data(), json.size(), &need);
        st != SPHSYM_OK)
        return report(st);
    json.resize(need - 1);

    std::printf("statistic %.17g\np_value %.17g\n", result.statistic, result.p_value);
    std::printf("%s\n", result.reject ? "reject" : "do not reject");
    if (!a.output.empty()) {
        std::FILE* f = std::fopen(a.output.c_str(), "wb");
        if (!f) {
            std::cerr << "error: cannot write '" << a.output << "'\n";
            return kExitRuntime;
        }
        std::fputs(json.c_str(), f);
        std::fputc('\n', f);
        std::fclose(f);
    }
    return kExitOk;
}

struct ZetaArgs {
    std::string sigma;
    size_t d = 0;
    uint64_t haar_m = 100000;
    uint64_t seed = 0;
};

int cmd_zeta(const ZetaArgs& a) {
    if (a.haar_m == 0) {
        std::cerr << "error: --haar-m must be at least 1\n";
        return kExitUsage;
    }
    Handle h;
    if (a.sigma == "identity") {
        if (a.d == 0) {
            std::cerr << "error: --sigma identity requires --d\n";
            return kExitUsage;
        }
        if (auto st = sphsym_cov_identity(a.d, 1.0, &h.cov); st != SPHSYM_OK) return report(st);
    } else {
        if (auto st = sphsym_cov_read_csv(a.sigma.c_str(), &h.cov); st != SPHSYM_OK)
            return report(st);
        size_t dim = 0;
        sphsym_cov_dim(h.cov, &dim);
        if (a.d != 0 && a.d != dim) {
            std::cerr << "error: --d " << a.d << " does not match the " << dim << "x" << dim
                      << " matrix\n";
            return kExitUsage;
        }
    }
    double est = 0.0, se = 0.0;
    if (auto st = sphsym_gaussian_zeta(h.cov, a.haar_m, a.seed, &est, &se); st != SPHSYM_OK)
        return report(st);
    std::printf("%.17g %.17g\n", est, se);
    return kExitOk;
}

struct StudyArgs {
    std::string config;
    double gamma = 0.0;
    std::vector<size_t> n{50, 100, 250, 500};
    std::string input;
    bool header = false;
    std::string label;
    std::vector<size_t> sizes;
    uint64_t R = 200;
    uint64_t B = 500;
    double alpha = 0.05;
    uint64_t seed = 1;
    std::string center = "spatial-median";
    std::string output;
    unsigned threads = 0;
};

int cmd_simulate(const StudyArgs& a) {
    Handle h;
    if (auto st = sphsym_config_load(a.config.c_str(), &h.config); st != SPHSYM_OK)
        return report(st);
    if (auto st = sphsym_run_power_study(h.config, a.threads, &h.study); st != SPHSYM_OK)
        return report(st);
    std::string stem = a.output.empty() ? sphsym_config_output(h.config) : a.output;
    return print_and_write(h.study, stem);
}

int cmd_pitman(const StudyArgs& a) {
    Handle h;
    if (auto st = sphsym_run_pitman_study(a.gamma, a.n.data(), a.n.size(), a.R, a.B, a.alpha,
                                          a.seed, a.threads, &h.study);
        st != SPHSYM_OK)
        return report(st);
    return print_and_write(h.study, a.output);
}

int cmd_subsample(const StudyArgs& a) {
    sphsym_center center{};
    parse_center(a.center, &center);
    Handle h;
    if (auto st = sphsym_sample_read_csv(a.input.c_str(), a.header ? 1 : 0, &h.sample);
        st != SPHSYM_OK)
        return report(st);
    const std::string label = a.label.empty() ? a.input : a.label;
    if (auto st = sphsym_run_subsample_study(h.sample, label.c_str(), a.sizes.data(),
                                             a.sizes.size(), a.R, a.B, a.alpha, a.seed, center,
                                             a.threads, &h.study);
        st != SPHSYM_OK)
        return report(st);
    return print_and_write(h.study, a.output);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-augmentation test for spherical symmetry"};
    app.set_version_flag("--version", std::string(sphsym_version()));
    app.require_subcommand(1, 1);
    app.failure_message(CLI::FailureMessage::help);

    const auto center_check = CLI::IsMember({"none", "spatial-median"});
    const auto open_unit = CLI::Range(0.0, 1.0);

    TestArgs ta;
    auto* test = app.add_subcommand("test", "Run the test on a CSV sample");
    test->add_option("--input", ta.input, "CSV file, one observation per row")->required();
    test->add_flag("--header", ta.header, "Skip the first line of the input");
    test->add_option("--alpha", ta.alpha, "Significance level")->check(open_unit)->capture_default_str();
    test->add_option("--B", ta.B, "Monte Carlo resamples")->check(CLI::PositiveNumber)->capture_default_str();
    test->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
    test->add_option("--center", ta.center, "none or spatial-median")->check(center_check)->capture_default_str();
    test->add_flag("--exact", ta.exact, "Enumerate all swap masks");
    test->add_option("--exact-limit", ta.exact_limit, "Largest n allowed with --exact")->capture_default_str();
    test->add_option("--output", ta.output, "Write the JSON result to this file");
    unsigned unused_threads = 0;
    test->add_option("--threads", unused_threads, "Accepted for symmetry; the test is single threaded");

    ZetaArgs za;
    auto* zeta = app.add_subcommand("zeta-gaussian", "Asymmetry measure of a centered Gaussian");
    zeta->add_option("--sigma", za.sigma, "Covariance CSV file or 'identity'")->required();
    zeta->add_option("--d", za.d, "Dimension (required with identity)");
    zeta->add_option("--haar-m", za.haar_m, "Haar Monte Carlo draws")->capture_default_str();
    zeta->add_option("--seed", za.seed, "Random seed")->capture_default_str();

    StudyArgs sa;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--R", sa.R, "Replications per cell")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--B", sa.B, "Monte Carlo resamples")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--alpha", sa.alpha, "Significance level")->check(open_unit)->capture_default_str();
        sub->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
        sub->add_option("--output", sa.output, "Output stem for .csv and .json");
        sub->add_option("--threads", sa.threads, "Worker threads (0 = all cores)");
    };

    auto* simulate = app.add_subcommand("simulate", "Run a power study from a config file");
    simulate->add_option("--config", sa.config, "Experiment config")->required();
    simulate->add_option("--output", sa.output, "Override the config's output stem");
    simulate->add_option("--threads", sa.threads, "Worker threads (0 = all cores)");

    auto* pitman = app.add_subcommand("pitman", "Power along the local mixture alternatives");
    pitman->add_option("--gamma", sa.gamma, "Exponent of the mixing weight")->required();
    pitman->add_option("--n", sa.n, "Sample sizes")->delimiter(',')->capture_default_str();
    add_common(pitman);

    auto* subsample = app.add_subcommand("subsample", "Power on subsamples of a dataset");
    subsample->add_option("--input", sa.input, "CSV dataset")->required();
    subsample->add_flag("--header", sa.header, "Skip the first line of the input");
    subsample->add_option("--sizes", sa.sizes, "Subsample sizes")->delimiter(',')->required();
    subsample->add_option("--center", sa.center, "none or spatial-median")->check(center_check)->capture_default_str();
    subsample->add_option("--label", sa.label, "Name used in the spec column");
    add_common(subsample);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (test->parsed()) return cmd_test(ta);
    if (zeta->parsed()) return cmd_zeta(za);
    if (simulate->parsed()) return cmd_simulate(sa);
    if (pitman->parsed()) return cmd_pitman(sa);
    return cmd_subsample(sa);
}
