#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sphsym/sphsym.h"

namespace fs = std::filesystem;

TEST(CApi, VersionAndStatusStrings) {
    EXPECT_STREQ(sphsym_version(), "1.0.0");
    EXPECT_STREQ(sphsym_status_string(SPHSYM_OK), "ok");
    EXPECT_STREQ(sphsym_status_string(SPHSYM_ERR_LIMIT), "limit exceeded");
}

TEST(CApi, NullArgumentsAreRejected) {
    sphsym_sample s = nullptr;
    EXPECT_EQ(sphsym_sample_create(nullptr, 2, 2, &s), SPHSYM_ERR_INVALID_ARGUMENT);
    EXPECT_NE(std::string(sphsym_last_error()).find("NULL"), std::string::npos);
    EXPECT_EQ(sphsym_run_test(nullptr, nullptr, nullptr), SPHSYM_ERR_INVALID_ARGUMENT);
    sphsym_sample_destroy(nullptr);
    sphsym_study_destroy(nullptr);
}

TEST(CApi, RunTestExactAndJson) {
    const double data[] = {1, 0, 0.5, -1, 2, 0.3, -0.7, 0.2, 1.1, 0.4, -0.9, 1.3, 0.8, 0.8, -0.2, -1.5};
    sphsym_sample s = nullptr;
    ASSERT_EQ(sphsym_sample_create(data, 8, 2, &s), SPHSYM_OK);
    size_t n = 0, d = 0;
    sphsym_sample_shape(s, &n, &d);
    EXPECT_EQ(n, 8u);
    EXPECT_EQ(d, 2u);

    sphsym_test_options opt;
    sphsym_test_options_init(&opt);
    EXPECT_EQ(opt.B, 500u);
    EXPECT_EQ(opt.alpha, 0.05);
    opt.exact = 1;
    sphsym_test_result r{};
    ASSERT_EQ(sphsym_run_test(s, &opt, &r), SPHSYM_OK);
    EXPECT_EQ(r.method, SPHSYM_METHOD_EXACT);
    EXPECT_GE(r.p_value, 1.0 / 128.0);

    size_t need = 0;
    char tiny[4];
    EXPECT_EQ(sphsym_test_result_json(&r, tiny, sizeof tiny, &need), SPHSYM_ERR_BUFFER);
    std::vector<char> buf(need);
    ASSERT_EQ(sphsym_test_result_json(&r, buf.data(), buf.size(), &need), SPHSYM_OK);
    const auto j = nlohmann::json::parse(buf.data());
    EXPECT_EQ(j["method"], "exact");
    EXPECT_EQ(j["p_value"].get<double>(), r.p_value);

    opt.exact_limit = 5;
    EXPECT_EQ(sphsym_run_test(s, &opt, &r), SPHSYM_ERR_LIMIT);
    opt.exact = 0;
    opt.alpha = 2.0;
    EXPECT_EQ(sphsym_run_test(s, &opt, &r), SPHSYM_ERR_INVALID_ARGUMENT);
    sphsym_sample_destroy(s);
}

TEST(CApi, ReadCsvErrors) {
    sphsym_sample s = nullptr;
    EXPECT_EQ(sphsym_sample_read_csv("/nonexistent/file.csv", 0, &s), SPHSYM_ERR_IO);
    const auto path = fs::temp_directory_path() / "sphsym_capi_bad.csv";
    std::ofstream(path) << "1,2\n3,oops\n";
    EXPECT_EQ(sphsym_sample_read_csv(path.c_str(), 0, &s), SPHSYM_ERR_PARSE);
    EXPECT_NE(std::string(sphsym_last_error()).find("line 2"), std::string::npos);
}

TEST(CApi, GaussianZeta) {
    sphsym_cov id = nullptr;
    ASSERT_EQ(sphsym_cov_identity(16, 3.0, &id), SPHSYM_OK);
    double est = 1, se = 1;
    ASSERT_EQ(sphsym_gaussian_zeta(id, 1000, 0, &est, &se), SPHSYM_OK);
    EXPECT_EQ(est, 0.0);
    EXPECT_EQ(se, 0.0);
    EXPECT_EQ(sphsym_gaussian_zeta(id, 0, 0, &est, &se), SPHSYM_ERR_INVALID_ARGUMENT);
    sphsym_cov_destroy(id);

    const double bad[] = {1, 2, 2, 1};
    sphsym_cov c = nullptr;
    EXPECT_EQ(sphsym_cov_create(bad, 2, &c), SPHSYM_ERR_INVALID_ARGUMENT);
    const double good[] = {4, 0, 0, 1};
    ASSERT_EQ(sphsym_cov_create(good, 2, &c), SPHSYM_OK);
    ASSERT_EQ(sphsym_gaussian_zeta(c, 2000, 1, &est, &se), SPHSYM_OK);
    EXPECT_GT(est, 0.0);
    EXPECT_GT(se, 0.0);
    sphsym_cov_destroy(c);
}

TEST(CApi, ConfigErrorsAndStudies) {
    sphsym_config cfg = nullptr;
    EXPECT_EQ(sphsym_config_parse("name = x\nwhat = 1\n", &cfg), SPHSYM_ERR_CONFIG);
    EXPECT_NE(std::string(sphsym_last_error()).find("'what'"), std::string::npos);
    EXPECT_EQ(sphsym_config_parse("name = x\n", &cfg), SPHSYM_ERR_CONFIG);
    EXPECT_EQ(sphsym_config_load("/nonexistent.cfg", &cfg), SPHSYM_ERR_IO);

    ASSERT_EQ(sphsym_config_parse("name = capi\nR = 5\ncell = 20, 3, gaussian(rho=0.2)\n", &cfg),
              SPHSYM_OK);
    EXPECT_STREQ(sphsym_config_output(cfg), "capi");
    sphsym_study study = nullptr;
    ASSERT_EQ(sphsym_run_power_study(cfg, 1, &study), SPHSYM_OK);
    EXPECT_STREQ(sphsym_study_name(study), "capi");
    ASSERT_EQ(sphsym_study_record_count(study), 1u);
    sphsym_power_record rec{};
    ASSERT_EQ(sphsym_study_record(study, 0, &rec), SPHSYM_OK);
    EXPECT_STREQ(rec.spec, "gaussian(rho=0.2)");
    EXPECT_EQ(rec.replications, 5u);
    EXPECT_EQ(rec.error, nullptr);
    EXPECT_EQ(sphsym_study_record(study, 1, &rec), SPHSYM_ERR_INVALID_ARGUMENT);
    const auto stem = (fs::temp_directory_path() / "sphsym_capi" / "study").string();
    ASSERT_EQ(sphsym_study_write(study, stem.c_str()), SPHSYM_OK);
    EXPECT_TRUE(fs::exists(stem + ".csv"));
    EXPECT_TRUE(fs::exists(stem + ".json"));
    sphsym_study_destroy(study);
    sphsym_config_destroy(cfg);

    const size_t grid[] = {10};
    EXPECT_EQ(sphsym_run_pitman_study(0.1, grid, 1, 5, 50, 0.05, 1, 1, &study),
              SPHSYM_ERR_INVALID_ARGUMENT);
    const size_t ok_grid[] = {50};
    ASSERT_EQ(sphsym_run_pitman_study(0.0, ok_grid, 1, 5, 50, 0.05, 1, 1, &study), SPHSYM_OK);
    EXPECT_EQ(sphsym_study_record_count(study), 1u);
    sphsym_study_destroy(study);
}

TEST(CApi, SubsampleStudy) {
    std::vector<double> data;
    for (int i = 0; i < 60; ++i) {
        data.push_back(std::sin(i * 1.7) * 3);
        data.push_back(std::cos(i * 0.9));
    }
    sphsym_sample s = nullptr;
    ASSERT_EQ(sphsym_sample_create(data.data(), 60, 2, &s), SPHSYM_OK);
    const size_t sizes[] = {20, 61};
    sphsym_study study = nullptr;
    EXPECT_EQ(sphsym_run_subsample_study(s, "wave", sizes, 2, 4, 50, 0.05, 1,
                                         SPHSYM_CENTER_SPATIAL_MEDIAN, 1, &study),
              SPHSYM_ERR_INVALID_ARGUMENT);
    ASSERT_EQ(sphsym_run_subsample_study(s, "wave", sizes, 1, 4, 50, 0.05, 1,
                                         SPHSYM_CENTER_SPATIAL_MEDIAN, 1, &study),
              SPHSYM_OK);
    sphsym_power_record rec{};
    ASSERT_EQ(sphsym_study_record(study, 0, &rec), SPHSYM_OK);
    EXPECT_STREQ(rec.spec, "subsample(wave)");
    EXPECT_EQ(rec.n, 20u);
    sphsym_study_destroy(study);
    sphsym_sample_destroy(s);
}
