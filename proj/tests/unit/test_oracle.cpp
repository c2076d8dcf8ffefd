#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sphsym/augment.hpp"
#include "sphsym/distributions.hpp"
#include "sphsym/error.hpp"
#include "sphsym/oracle.hpp"

using namespace sphsym;

namespace {

Eigen::MatrixXd diag(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) v(k++) = x;
    return v.asDiagonal();
}

}  // namespace

TEST(CovSpec, ValidatesInput) {
    Eigen::MatrixXd asym(2, 2);
    asym << 1, 0.5, 0.4, 1;
    EXPECT_THROW(CovSpec{asym}, InvalidArgument);
    Eigen::MatrixXd neg(2, 2);
    neg << 1, 2, 2, -1;
    EXPECT_THROW(CovSpec{neg}, InvalidArgument);
    EXPECT_THROW(CovSpec{Eigen::MatrixXd(2, 3)}, InvalidArgument);
    EXPECT_NO_THROW(CovSpec{Eigen::MatrixXd::Zero(3, 3)});
    EXPECT_TRUE(CovSpec::identity(4, 2.5).is_scalar_identity());
    EXPECT_FALSE(CovSpec{diag({1, 1.001})}.is_scalar_identity());
}

TEST(GaussianPairTerm, IdentityClosedForm) {
    for (std::size_t d : {1u, 2u, 5u, 16u, 100u}) {
        const auto id = CovSpec::identity(d);
        EXPECT_NEAR(gaussian_pair_term(id, id), std::pow(1.0 + 2.0 / d, -0.5 * d), 1e-14);
    }
    EXPECT_NEAR(gaussian_pair_term(CovSpec::identity(2), CovSpec::identity(2)), 0.5, 1e-15);
}

TEST(GaussianPairTerm, PointMassesGiveOne) {
    const CovSpec zero{Eigen::MatrixXd::Zero(3, 3)};
    EXPECT_EQ(gaussian_pair_term(zero, zero), 1.0);
}

TEST(GaussianPairTerm, DiagonalExample) {
    EXPECT_NEAR(gaussian_pair_term(CovSpec{diag({4, 1})}, CovSpec{diag({1, 4})}), 1.0 / 3.5, 1e-15);
    EXPECT_NEAR(1.0 / 3.5, 0.285714, 1e-6);
}

TEST(GaussianPairTerm, SymmetricAndConjugationInvariant) {
    RngStream rng(1);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t d = 1 + rng.below(6);
        Eigen::MatrixXd a(d, d), b(d, d);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a.data()[i] = rng.normal();
            b.data()[i] = rng.normal();
        }
        const CovSpec s1{a * a.transpose()}, s2{b * b.transpose()};
        const auto h = sample_haar_orthogonal(d, rng);
        const CovSpec r1{h * s1.matrix() * h.transpose()}, r2{h * s2.matrix() * h.transpose()};
        EXPECT_NEAR(gaussian_pair_term(s1, s2), gaussian_pair_term(s2, s1), 1e-14);
        EXPECT_NEAR(gaussian_pair_term(s1, s2), gaussian_pair_term(r1, r2), 1e-12);
    }
}

TEST(HaarOrthogonal, IsOrthogonal) {
    RngStream rng(2);
    for (std::size_t d = 1; d <= 40; d += 3) {
        const auto h = sample_haar_orthogonal(d, rng);
        EXPECT_LT((h * h.transpose() - Eigen::MatrixXd::Identity(d, d)).norm(), 1e-10);
    }
}

TEST(HaarOrthogonal, OneDimensionIsFairSign) {
    RngStream rng(3);
    int plus = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        const double h = sample_haar_orthogonal(1, rng)(0, 0);
        ASSERT_TRUE(h == 1.0 || h == -1.0);
        plus += h > 0;
    }
    EXPECT_NEAR(plus / double(draws), 0.5, 4 * std::sqrt(0.25 / draws));
}

TEST(HaarOrthogonal, FirstMomentVanishes) {
    RngStream rng(4);
    const int draws = 100000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < draws; ++i) {
        const double h = sample_haar_orthogonal(3, rng)(0, 0);
        sum += h;
        sum2 += h * h;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
    EXPECT_LT(std::abs(mean), 4 * se);
}

TEST(GaussianZeta, ScalarIdentityIsExactlyZero) {
    for (double c : {0.1, 1.0, 10.0})
        for (std::size_t d : {1u, 2u, 16u}) {
            const auto v = gaussian_zeta(CovSpec::identity(d, c));
            EXPECT_EQ(v.estimate, 0.0);
            EXPECT_EQ(v.std_error, 0.0);
        }
}

TEST(GaussianZeta, RequiresDraws) {
    EXPECT_THROW(gaussian_zeta(CovSpec{diag({4, 1})}, {0, 0}), InvalidArgument);
}

TEST(GaussianZeta, MatchesAngleQuadrature) {
    Eigen::Matrix2d s;
    s << 4, 0, 0, 1;
    const double truth = oracle::quadrature_zeta_2d(s);
    EXPECT_NEAR(truth, 0.0158370005814585, 1e-12);
    const auto v = gaussian_zeta(CovSpec{s});
    EXPECT_LE(std::abs(v.estimate - truth), 3 * v.std_error);
}

TEST(GaussianZeta, QuadratureOfRotatedNonDiagonalMatrix) {
    Eigen::Matrix2d s;
    s << 2, 0.8, 0.8, 1;
    const auto v = gaussian_zeta(CovSpec{s}, {50000, 3});
    EXPECT_LE(std::abs(v.estimate - oracle::quadrature_zeta_2d(s)), 3 * v.std_error);
}

TEST(GaussianZeta, RotationInvariantWithPairedSeeds) {
    RngStream rng(5);
    Eigen::MatrixXd a(4, 4);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    const Eigen::MatrixXd s = a * a.transpose();
    const auto h = sample_haar_orthogonal(4, rng);
    const auto x = gaussian_zeta(CovSpec{s}, {20000, 9});
    const auto y = gaussian_zeta(CovSpec{h * s * h.transpose()}, {20000, 9});
    EXPECT_LE(std::abs(x.estimate - y.estimate), 3 * std::hypot(x.std_error, y.std_error));
}

TEST(GaussianZeta, NonNegativeUpToError) {
    RngStream rng(6);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t d = 2 + rng.below(5);
        Eigen::MatrixXd a(d, d);
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
        const auto v = gaussian_zeta(CovSpec{a * a.transpose()}, {5000, static_cast<std::uint64_t>(rep)});
        EXPECT_GE(v.estimate, -3 * v.std_error);
    }
}

TEST(McZeta, SphericalGaussianNearZero) {
    RngStream rng(7);
    const auto v = mc_zeta(make_gaussian(3), {}, rng);
    EXPECT_LE(std::abs(v.estimate), 3 * v.std_error);
}

TEST(McZeta, AgreesWithGaussianOracle) {
    RngStream rng(8);
    const auto m = mc_zeta(make_gaussian(diag({4, 1})), {}, rng);
    const auto g = gaussian_zeta(CovSpec{diag({4, 1})});
    EXPECT_LE(std::abs(m.estimate - g.estimate), 3 * std::hypot(m.std_error, g.std_error));
}

TEST(McZeta, ContaminationHalvesTwice) {
    RngStream rng(9);
    const auto f = make_gaussian(diag({4, 1}));
    const auto m = mc_zeta(make_contaminated(0.5, f, make_gaussian(2)), {}, rng);
    const auto g = gaussian_zeta(CovSpec{diag({4, 1})});
    EXPECT_LE(std::abs(m.estimate - 0.25 * g.estimate),
              3 * std::hypot(m.std_error, 0.25 * g.std_error));
}

TEST(McZeta, Concentration) {
    // P(|zeta_hat - zeta| > eps) <= 2 exp(-n eps^2 / 32)
    const std::size_t n = 60, reps = 400;
    const auto spec = make_gaussian(4);
    std::vector<double> values;
    for (std::size_t r = 0; r < reps; ++r) {
        RngStream rng(10, r);
        const auto aug = augment(sample(spec, n, rng), rng);
        values.push_back(zeta_hat(aug, build_gram(aug)).value);
    }
    for (double eps : {0.02, 0.05, 0.1, 0.5, 1.0}) {
        double frac = 0;
        for (double v : values) frac += std::abs(v) > eps;
        frac /= reps;
        const double bound = std::min(1.0, 2 * std::exp(-double(n) * eps * eps / 32));
        EXPECT_LE(frac, bound + 3 * std::sqrt(bound * (1 - bound) / reps)) << "eps " << eps;
    }
}
