/*
 * sphsym: data-augmentation test for spherical symmetry.
 *
 * C interface to the shared library. Objects are opaque handles created by
 * sphsym_*_create/load functions and released with the matching _destroy.
 * Every fallible call returns a sphsym_status; on failure the message is
 * available from sphsym_last_error() on the calling thread until the next
 * failing call.
 */
#ifndef SPHSYM_H
#define SPHSYM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SPHSYM_BUILDING_LIBRARY)
#    define SPHSYM_API __declspec(dllexport)
#  else
#    define SPHSYM_API __declspec(dllimport)
#  endif
#else
#  define SPHSYM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sphsym_status {
    SPHSYM_OK = 0,
    SPHSYM_ERR_INVALID_ARGUMENT = 1, /* bad parameter, non-PSD matrix, ... */
    SPHSYM_ERR_LIMIT = 2,            /* exact enumeration above the limit */
    SPHSYM_ERR_CONFIG = 3,           /* experiment config schema violation */
    SPHSYM_ERR_IO = 4,               /* file cannot be opened/written */
    SPHSYM_ERR_PARSE = 5,            /* malformed CSV or descriptor */
    SPHSYM_ERR_BUFFER = 6,           /* output buffer too small */
    SPHSYM_ERR_INTERNAL = 7
} sphsym_status;

typedef enum sphsym_center { SPHSYM_CENTER_NONE = 0, SPHSYM_CENTER_SPATIAL_MEDIAN = 1 } sphsym_center;

typedef enum sphsym_method { SPHSYM_METHOD_EXACT = 0, SPHSYM_METHOD_MONTE_CARLO = 1 } sphsym_method;

typedef struct sphsym_sample_t* sphsym_sample;
typedef struct sphsym_cov_t* sphsym_cov;
typedef struct sphsym_config_t* sphsym_config;
typedef struct sphsym_study_t* sphsym_study;

SPHSYM_API const char* sphsym_version(void);
SPHSYM_API const char* sphsym_last_error(void);
SPHSYM_API const char* sphsym_status_string(sphsym_status status);

/* ---- samples ------------------------------------------------------------ */

/* Copies an n x d row-major matrix. */
SPHSYM_API sphsym_status sphsym_sample_create(const double* data, size_t n, size_t d,
                                              sphsym_sample* out);
/* Comma-separated rows; has_header != 0 skips the first non-blank line. */
SPHSYM_API sphsym_status sphsym_sample_read_csv(const char* path, int has_header,
                                                sphsym_sample* out);
SPHSYM_API sphsym_status sphsym_sample_shape(sphsym_sample sample, size_t* n, size_t* d);
SPHSYM_API void sphsym_sample_destroy(sphsym_sample sample);

/* ---- the test ----------------------------------------------------------- */

typedef struct sphsym_test_options {
    double alpha;        /* default 0.05 */
    uint64_t B;          /* default 500 */
    uint64_t seed;       /* default 0 */
    sphsym_center center;/* default none */
    int exact;           /* nonzero: enumerate all 2^n swap masks */
    uint64_t exact_limit;/* default 20 */
} sphsym_test_options;

typedef struct sphsym_test_result {
    double statistic;
    double p_value;
    sphsym_method method;
    uint64_t B; /* 0 for exact */
    double alpha;
    int reject;
    size_t n;
    size_t d;
    uint64_t seed;
    sphsym_center center;
    double c_alpha_bound;
} sphsym_test_result;

SPHSYM_API void sphsym_test_options_init(sphsym_test_options* options);
SPHSYM_API sphsym_status sphsym_run_test(sphsym_sample sample, const sphsym_test_options* options,
                                         sphsym_test_result* result);
/* JSON object for a result. Writes at most `capacity` bytes including the
 * terminator; *required receives the full size (terminator included).
 * Returns SPHSYM_ERR_BUFFER when capacity is too small. */
SPHSYM_API sphsym_status sphsym_test_result_json(const sphsym_test_result* result, char* buffer,
                                                 size_t capacity, size_t* required);

/* ---- Gaussian oracle ---------------------------------------------------- */

SPHSYM_API sphsym_status sphsym_cov_create(const double* data, size_t d, sphsym_cov* out);
SPHSYM_API sphsym_status sphsym_cov_identity(size_t d, double scale, sphsym_cov* out);
SPHSYM_API sphsym_status sphsym_cov_read_csv(const char* path, sphsym_cov* out);
SPHSYM_API sphsym_status sphsym_cov_dim(sphsym_cov cov, size_t* d);
SPHSYM_API void sphsym_cov_destroy(sphsym_cov cov);

/* zeta(N(0, sigma)) with m Haar draws. Scalar identities give exactly 0, 0. */
SPHSYM_API sphsym_status sphsym_gaussian_zeta(sphsym_cov cov, uint64_t haar_m, uint64_t seed,
                                              double* estimate, double* std_error);

/* ---- experiments -------------------------------------------------------- */

typedef struct sphsym_power_record {
    const char* spec; /* owned by the study handle */
    size_t n;
    size_t d;
    size_t rejections;
    size_t replications;
    double power;
    double std_error;
    const char* error; /* NULL unless the cell aborted */
} sphsym_power_record;

SPHSYM_API sphsym_status sphsym_config_load(const char* path, sphsym_config* out);
SPHSYM_API sphsym_status sphsym_config_parse(const char* text, sphsym_config* out);
/* Output stem declared by the config (owned by the handle). */
SPHSYM_API const char* sphsym_config_output(sphsym_config config);
SPHSYM_API void sphsym_config_destroy(sphsym_config config);

/* threads = 0 uses hardware concurrency; results never depend on it. */
SPHSYM_API sphsym_status sphsym_run_power_study(sphsym_config config, unsigned threads,
                                                sphsym_study* out);
SPHSYM_API sphsym_status sphsym_run_pitman_study(double gamma, const size_t* n_grid,
                                                 size_t n_count, uint64_t replications, uint64_t B,
                                                 double alpha, uint64_t seed, unsigned threads,
                                                 sphsym_study* out);
SPHSYM_API sphsym_status sphsym_run_subsample_study(sphsym_sample data, const char* label,
                                                    const size_t* sizes, size_t size_count,
                                                    uint64_t replications, uint64_t B,
                                                    double alpha, uint64_t seed,
                                                    sphsym_center center, unsigned threads,
                                                    sphsym_study* out);

SPHSYM_API size_t sphsym_study_record_count(sphsym_study study);
SPHSYM_API sphsym_status sphsym_study_record(sphsym_study study, size_t index,
                                             sphsym_power_record* record);
SPHSYM_API const char* sphsym_study_name(sphsym_study study);
/* Writes <stem>.csv and <stem>.json. */
SPHSYM_API sphsym_status sphsym_study_write(sphsym_study study, const char* stem);
SPHSYM_API void sphsym_study_destroy(sphsym_study study);

#ifdef __cplusplus
}
#endif

#endif /* SPHSYM_H */
