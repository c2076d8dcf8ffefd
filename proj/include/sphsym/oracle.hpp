#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "sphsym/rng.hpp"

namespace sphsym {

struct DistributionSpec;

/// Symmetric positive-semidefinite covariance matrix.
class CovSpec {
public:
    /// Throws InvalidArgument unless symmetric within 1e-12 with every
    /// eigenvalue >= -1e-10.
    explicit CovSpec(Eigen::MatrixXd sigma);
    static CovSpec identity(std::size_t d, double scale = 1.0);

    const Eigen::MatrixXd& matrix() const noexcept { return sigma_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }
    /// |sigma - tr(sigma)/d I|_F < 1e-12.
    bool is_scalar_identity() const;

private:
    Eigen::MatrixXd sigma_;
};

struct HaarConfig {
    std::size_t m = 100000;
    std::uint64_t seed = 0;
};

struct MonteCarloValue {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// E exp(-|X1 - X2|^2 / (2d)) for independent X_k ~ N(0, sigma_k):
/// |(sigma_1 + sigma_2)/d + I|^{-1/2}, from a Cholesky log-determinant.
double gaussian_pair_term(const CovSpec& sigma1, const CovSpec& sigma2);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// column signs fixed so diag(R) > 0.
Eigen::MatrixXd sample_haar_orthogonal(std::size_t d, RngStream& rng);

/// zeta(N(0, sigma)). The first term is exact; the double and single Haar
/// integrals are averaged over m independent (H1, H2, H) draws. Scalar
/// multiples of the identity return exactly {0, 0}.
MonteCarloValue gaussian_zeta(const CovSpec& sigma, const HaarConfig& haar = {});

struct MonteCarloZetaOptions {
    std::size_t n_big = 200;
    std::size_t reps = 200;
};

/// Mean and standard error of zeta_hat over independent samples.
MonteCarloValue mc_zeta(const DistributionSpec& dist, const MonteCarloZetaOptions& options,
                        RngStream& rng);

}  // namespace sphsym
