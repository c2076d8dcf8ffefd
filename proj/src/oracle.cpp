#include "sphsym/oracle.hpp"

#include <cmath>

#include "sphsym/augment.hpp"
#include "sphsym/core.hpp"
#include "sphsym/distributions.hpp"
#include "sphsym/error.hpp"

namespace sphsym {

CovSpec::CovSpec(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
    if (sigma_.rows() < 1 || sigma_.rows() != sigma_.cols())
        throw InvalidArgument("covariance must be a non-empty square matrix");
    if (!sigma_.allFinite()) throw InvalidArgument("covariance has non-finite entries");
    if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw InvalidArgument("covariance is not symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
        throw InvalidArgument("covariance is not positive semidefinite");
}

CovSpec CovSpec::identity(std::size_t d, double scale) {
    if (d < 1) throw InvalidArgument("dimension must be at least 1");
    return CovSpec(scale * Eigen::MatrixXd::Identity(d, d));
}

bool CovSpec::is_scalar_identity() const {
    const double mean_diag = sigma_.trace() / static_cast<double>(dim());
    const auto eye = Eigen::MatrixXd::Identity(sigma_.rows(), sigma_.cols());
    return (sigma_ - mean_diag * eye).norm() < 1e-12;
}

namespace {

double pair_term(const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
    const auto d = s1.rows();
    Eigen::MatrixXd m = (s1 + s2) / static_cast<double>(d);
    m.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw InvalidArgument("(sigma1 + sigma2)/d + I is not SPD");
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return std::exp(-0.5 * logdet);
}

}  // namespace

double gaussian_pair_term(const CovSpec& sigma1, const CovSpec& sigma2) {
    if (sigma1.dim() != sigma2.dim()) throw InvalidArgument("covariance dimensions differ");
    return pair_term(sigma1.matrix(), sigma2.matrix());
}

Eigen::MatrixXd sample_haar_orthogonal(std::size_t d, RngStream& rng) {
    if (d < 1) throw InvalidArgument("dimension must be at least 1");
    const auto dd = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd g(dd, dd);
    for (Eigen::Index c = 0; c < dd; ++c)
        for (Eigen::Index r = 0; r < dd; ++r) g(r, c) = rng.normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dd; ++k)
        if (r(k, k) < 0.0) q.col(k) = -q.col(k);
    return q;
}

MonteCarloValue gaussian_zeta(const CovSpec& sigma, const HaarConfig& haar) {
    if (haar.m < 1) throw InvalidArgument("Haar draw count m must be at least 1");
    if (sigma.is_scalar_identity()) return {0.0, 0.0};

    const auto& s = sigma.matrix();
    const std::size_t d = sigma.dim();
    const double exact_term = pair_term(s, s);

    RngStream rng(haar.seed, 0x4a17);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < haar.m; ++k) {
        const auto h1 = sample_haar_orthogonal(d, rng);
        const auto h2 = sample_haar_orthogonal(d, rng);
        const auto h = sample_haar_orthogonal(d, rng);
        const Eigen::MatrixXd r1 = h1 * s * h1.transpose();
        const Eigen::MatrixXd r2 = h2 * s * h2.transpose();
        const Eigen::MatrixXd r = h * s * h.transpose();
        const double z = pair_term(r1, r2) - 2.0 * pair_term(s, r);
        // Welford
        const double delta = z - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (z - mean);
    }
    const double var = haar.m > 1 ? m2 / static_cast<double>(haar.m - 1) : 0.0;
    return {exact_term + mean, std::sqrt(var / static_cast<double>(haar.m))};
}

MonteCarloValue mc_zeta(const DistributionSpec& dist, const MonteCarloZetaOptions& options,
                        RngStream& rng) {
    if (options.n_big < 2) throw InvalidArgument("mc_zeta needs n_big >= 2");
    if (options.reps < 2) throw InvalidArgument("mc_zeta needs reps >= 2");
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t r = 0; r < options.reps; ++r) {
        auto child = rng.derive(r);
        const Sample x = sample(dist, options.n_big, child);
        const AugmentedSample aug = augment(x, child);
        const double z = zeta_hat(aug, build_gram(aug)).value;
        const double delta = z - mean;
        mean += delta / static_cast<double>(r + 1);
        m2 += delta * (z - mean);
    }
    const double var = m2 / static_cast<double>(options.reps - 1);
    return {mean, std::sqrt(var / static_cast<double>(options.reps))};
}

}  // namespace sphsym
