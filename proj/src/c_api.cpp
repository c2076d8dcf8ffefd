#include "sphsym/sphsym.h"

#include <cstring>
#include <string>
#include <vector>

#include "sphsym/calibrate.hpp"
#include "sphsym/error.hpp"
#include "sphsym/experiments.hpp"
#include "sphsym/io.hpp"
#include "sphsym/oracle.hpp"

struct sphsym_sample_t {
    sphsym::Sample sample;
};

struct sphsym_cov_t {
    sphsym::CovSpec cov;
};

struct sphsym_config_t {
    sphsym::ExperimentConfig config;
};

struct sphsym_study_t {
    sphsym::StudyResult result;
};

namespace {

thread_local std::string last_error;

sphsym_status fail(sphsym_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs fn, translating exceptions to status codes.
template <class Fn>
sphsym_status guarded(Fn&& fn) {
    try {
        fn();
        return SPHSYM_OK;
    } catch (const sphsym::ConfigError& e) {
        return fail(SPHSYM_ERR_CONFIG, e.what());
    } catch (const sphsym::LimitExceeded& e) {
        return fail(SPHSYM_ERR_LIMIT, e.what());
    } catch (const sphsym::InvalidArgument& e) {
        return fail(SPHSYM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const sphsym::ParseError& e) {
        return fail(SPHSYM_ERR_PARSE, e.what());
    } catch (const sphsym::IoError& e) {
        return fail(SPHSYM_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SPHSYM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(SPHSYM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SPHSYM_ERR_INTERNAL, "unknown error");
    }
}

#define SPHSYM_REQUIRE(ptr)                                                            \
    do {                                                                               \
        if (!(ptr)) return fail(SPHSYM_ERR_INVALID_ARGUMENT, #ptr " must not be NULL"); \
    } while (0)

sphsym::CenterMode to_center(sphsym_center c) {
    switch (c) {
        case SPHSYM_CENTER_NONE: return sphsym::CenterMode::none;
        case SPHSYM_CENTER_SPATIAL_MEDIAN: return sphsym::CenterMode::spatial_median;
    }
    throw sphsym::InvalidArgument("unknown center mode");
}

sphsym_test_result to_c(const sphsym::TestOutcome& o) {
    sphsym_test_result r{};
    r.statistic = o.statistic;
    r.p_value = o.p_value;
    r.method = o.method == sphsym::Method::exact ? SPHSYM_METHOD_EXACT : SPHSYM_METHOD_MONTE_CARLO;
    r.B = o.B;
    r.alpha = o.alpha;
    r.reject = o.reject ? 1 : 0;
    r.n = o.n;
    r.d = o.d;
    r.seed = o.seed;
    r.center = o.center == sphsym::CenterMode::none ? SPHSYM_CENTER_NONE
                                                    : SPHSYM_CENTER_SPATIAL_MEDIAN;
    r.c_alpha_bound = o.c_alpha_bound;
    return r;
}

sphsym::TestOutcome from_c(const sphsym_test_result& r) {
    sphsym::TestOutcome o;
    o.statistic = r.statistic;
    o.p_value = r.p_value;
    o.method = r.method == SPHSYM_METHOD_EXACT ? sphsym::Method::exact : sphsym::Method::monte_carlo;
    o.B = r.B;
    o.alpha = r.alpha;
    o.reject = r.reject != 0;
    o.n = r.n;
    o.d = r.d;
    o.seed = r.seed;
    o.center = to_center(r.center);
    o.c_alpha_bound = r.c_alpha_bound;
    return o;
}

}  // namespace

extern "C" {

const char* sphsym_version(void) { return "1.0.0"; }

const char* sphsym_last_error(void) { return last_error.c_str(); }

const char* sphsym_status_string(sphsym_status status) {
    switch (status) {
        case SPHSYM_OK: return "ok";
        case SPHSYM_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SPHSYM_ERR_LIMIT: return "limit exceeded";
        case SPHSYM_ERR_CONFIG: return "config error";
        case SPHSYM_ERR_IO: return "i/o error";
        case SPHSYM_ERR_PARSE: return "parse error";
        case SPHSYM_ERR_BUFFER: return "buffer too small";
        case SPHSYM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

sphsym_status sphsym_sample_create(const double* data, size_t n, size_t d, sphsym_sample* out) {
    SPHSYM_REQUIRE(data);
    SPHSYM_REQUIRE(out);
    return guarded([&] {
        *out = new sphsym_sample_t{sphsym::Sample(std::vector<double>(data, data + n * d), n, d)};
    });
}

sphsym_status sphsym_sample_read_csv(const char* path, int has_header, sphsym_sample* out) {
    SPHSYM_REQUIRE(path);
    SPHSYM_REQUIRE(out);
    return guarded(
        [&] { *out = new sphsym_sample_t{sphsym::read_csv_sample(path, has_header != 0)}; });
}

sphsym_status sphsym_sample_shape(sphsym_sample sample, size_t* n, size_t* d) {
    SPHSYM_REQUIRE(sample);
    if (n) *n = sample->sample.n();
    if (d) *d = sample->sample.d();
    return SPHSYM_OK;
}

void sphsym_sample_destroy(sphsym_sample sample) { delete sample; }

void sphsym_test_options_init(sphsym_test_options* options) {
    if (!options) return;
    options->alpha = 0.05;
    options->B = sphsym::default_resamples;
    options->seed = 0;
    options->center = SPHSYM_CENTER_NONE;
    options->exact = 0;
    options->exact_limit = sphsym::default_exact_limit;
}

sphsym_status sphsym_run_test(sphsym_sample sample, const sphsym_test_options* options,
                              sphsym_test_result* result) {
    SPHSYM_REQUIRE(sample);
    SPHSYM_REQUIRE(options);
    SPHSYM_REQUIRE(result);
    return guarded([&] {
        sphsym::TestOptions opt;
        opt.alpha = options->alpha;
        opt.B = options->B;
        opt.center = to_center(options->center);
        opt.exact = options->exact != 0;
        opt.exact_limit = options->exact_limit;
        sphsym::RngStream rng(options->seed);
        *result = to_c(sphsym::run_test(sample->sample, opt, rng));
    });
}

sphsym_status sphsym_test_result_json(const sphsym_test_result* result, char* buffer,
                                      size_t capacity, size_t* required) {
    SPHSYM_REQUIRE(result);
    std::string text;
    const auto status = guarded([&] { text = sphsym::to_json(from_c(*result)).dump(2); });
    if (status != SPHSYM_OK) return status;
    if (required) *required = text.size() + 1;
    if (!buffer || capacity < text.size() + 1)
        return fail(SPHSYM_ERR_BUFFER, "JSON buffer needs " + std::to_string(text.size() + 1) +
                                           " bytes");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    return SPHSYM_OK;
}

sphsym_status sphsym_cov_create(const double* data, size_t d, sphsym_cov* out) {
    SPHSYM_REQUIRE(data);
    SPHSYM_REQUIRE(out);
    return guarded([&] {
        if (d < 1) throw sphsym::InvalidArgument("dimension must be at least 1");
        const auto dd = static_cast<Eigen::Index>(d);
        Eigen::MatrixXd m(dd, dd);
        for (Eigen::Index r = 0; r < dd; ++r)
            for (Eigen::Index c = 0; c < dd; ++c) m(r, c) = data[r * dd + c];
        *out = new sphsym_cov_t{sphsym::CovSpec(std::move(m))};
    });
}

sphsym_status sphsym_cov_identity(size_t d, double scale, sphsym_cov* out) {
    SPHSYM_REQUIRE(out);
    return guarded([&] { *out = new sphsym_cov_t{sphsym::CovSpec::identity(d, scale)}; });
}

sphsym_status sphsym_cov_read_csv(const char* path, sphsym_cov* out) {
    SPHSYM_REQUIRE(path);
    SPHSYM_REQUIRE(out);
    return guarded([&] {
        const auto rows = sphsym::read_csv_rows(path, false);
        if (rows.empty() || rows.size() != rows.front().size())
            throw sphsym::InvalidArgument("covariance file must hold a square matrix");
        const auto d = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd m(d, d);
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index c = 0; c < d; ++c)
                m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        *out = new sphsym_cov_t{sphsym::CovSpec(std::move(m))};
    });
}

sphsym_status sphsym_cov_dim(sphsym_cov cov, size_t* d) {
    SPHSYM_REQUIRE(cov);
    SPHSYM_REQUIRE(d);
    *d = cov->cov.dim();
    return SPHSYM_OK;
}

void sphsym_cov_destroy(sphsym_cov cov) { delete cov; }

sphsym_status sphsym_gaussian_zeta(sphsym_cov cov, uint64_t haar_m, uint64_t seed,
                                   double* estimate, double* std_error) {
    SPHSYM_REQUIRE(cov);
    SPHSYM_REQUIRE(estimate);
    return guarded([&] {
        const auto v = sphsym::gaussian_zeta(cov->cov, {haar_m, seed});
        *estimate = v.estimate;
        if (std_error) *std_error = v.std_error;
    });
}

sphsym_status sphsym_config_load(const char* path, sphsym_config* out) {
    SPHSYM_REQUIRE(path);
    SPHSYM_REQUIRE(out);
    return guarded([&] { *out = new sphsym_config_t{sphsym::load_config(path)}; });
}

sphsym_status sphsym_config_parse(const char* text, sphsym_config* out) {
    SPHSYM_REQUIRE(text);
    SPHSYM_REQUIRE(out);
    return guarded([&] { *out = new sphsym_config_t{sphsym::parse_config(text)}; });
}

const char* sphsym_config_output(sphsym_config config) {
    return config ? config->config.output.c_str() : nullptr;
}

void sphsym_config_destroy(sphsym_config config) { delete config; }

sphsym_status sphsym_run_power_study(sphsym_config config, unsigned threads, sphsym_study* out) {
    SPHSYM_REQUIRE(config);
    SPHSYM_REQUIRE(out);
    return guarded(
        [&] { *out = new sphsym_study_t{sphsym::run_power_study(config->config, threads)}; });
}

sphsym_status sphsym_run_pitman_study(double gamma, const size_t* n_grid, size_t n_count,
                                      uint64_t replications, uint64_t B, double alpha,
                                      uint64_t seed, unsigned threads, sphsym_study* out) {
    SPHSYM_REQUIRE(n_grid);
    SPHSYM_REQUIRE(out);
    return guarded([&] {
        sphsym::PitmanOptions opt;
        opt.gamma = gamma;
        opt.n_grid.assign(n_grid, n_grid + n_count);
        opt.replications = replications;
        opt.B = B;
        opt.alpha = alpha;
        opt.seed = seed;
        if (replications < 1) throw sphsym::InvalidArgument("replications must be at least 1");
        if (B < 1) throw sphsym::InvalidArgument("B must be at least 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw sphsym::InvalidArgument("alpha must lie in (0, 1)");
        *out = new sphsym_study_t{sphsym::run_pitman_study(opt, threads)};
    });
}

sphsym_status sphsym_run_subsample_study(sphsym_sample data, const char* label,
                                         const size_t* sizes, size_t size_count,
                                         uint64_t replications, uint64_t B, double alpha,
                                         uint64_t seed, sphsym_center center, unsigned threads,
                                         sphsym_study* out) {
    SPHSYM_REQUIRE(data);
    SPHSYM_REQUIRE(sizes);
    SPHSYM_REQUIRE(out);
    return guarded([&] {
        sphsym::SubsampleOptions opt;
        opt.sizes.assign(sizes, sizes + size_count);
        opt.replications = replications;
        opt.B = B;
        opt.alpha = alpha;
        opt.seed = seed;
        opt.center = to_center(center);
        if (label) opt.label = label;
        if (B < 1) throw sphsym::InvalidArgument("B must be at least 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw sphsym::InvalidArgument("alpha must lie in (0, 1)");
        *out = new sphsym_study_t{sphsym::run_subsample_study(data->sample, opt, threads)};
    });
}

size_t sphsym_study_record_count(sphsym_study study) {
    return study ? study->result.records.size() : 0;
}

sphsym_status sphsym_study_record(sphsym_study study, size_t index, sphsym_power_record* record) {
    SPHSYM_REQUIRE(study);
    SPHSYM_REQUIRE(record);
    if (index >= study->result.records.size())
        return fail(SPHSYM_ERR_INVALID_ARGUMENT, "record index out of range");
    const auto& r = study->result.records[index];
    record->spec = r.spec.c_str();
    record->n = r.n;
    record->d = r.d;
    record->rejections = r.rejections;
    record->replications = r.replications;
    record->power = r.power;
    record->std_error = r.standard_error;
    record->error = r.error ? r.error->c_str() : nullptr;
    return SPHSYM_OK;
}

const char* sphsym_study_name(sphsym_study study) {
    return study ? study->result.name.c_str() : nullptr;
}

sphsym_status sphsym_study_write(sphsym_study study, const char* stem) {
    SPHSYM_REQUIRE(study);
    SPHSYM_REQUIRE(stem);
    return guarded([&] { sphsym::write_study(study->result, stem); });
}

void sphsym_study_destroy(sphsym_study study) { delete study; }

}  // extern "C"
