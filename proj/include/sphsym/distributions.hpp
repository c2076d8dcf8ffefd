#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

#include "sphsym/core.hpp"
#include "sphsym/rng.hpp"

namespace sphsym {

struct DistributionSpec;

/// Centered Gaussian. Either equicorrelation scatter (1 - rho) I + rho 11^T
/// or an explicit covariance (which takes precedence when present).
struct GaussianFamily {
    double rho = 0.0;
    std::optional<Eigen::MatrixXd> sigma;
    Eigen::MatrixXd factor;  // L with L L^T = sigma; filled by make_gaussian
};

/// Z / sqrt(W / nu) with Z equicorrelated Gaussian and W ~ chi^2(nu).
/// nu = 1 is the multivariate Cauchy; rho = 0 gives the spherical law.
struct StudentTFamily {
    double nu = 4.0;
    double rho = 0.0;
};

/// R * Y / |Y|_p with R ~ Unif(radius_lo, radius_hi). p = inf uses Y
/// uniform on the cube, p = 1 uses i.i.d. standard Laplace coordinates.
struct LpSymmetricFamily {
    enum class Norm { l1, linf };
    Norm norm = Norm::linf;
    double radius_lo = 9.0;
    double radius_hi = 10.0;
};

/// d = 5. U uniform on S^4 and R | U ~ Unif(0, theta_U) with theta_U in
/// {10, 50, 100} chosen by the signs of u1 u2 and u3 u4 u5.
struct AngularFamily {};

/// d = 5. Equal mixture of N(mu, I) for mu in {1, -1, beta, -beta},
/// beta = (1, -1, 1, -1, 1).
struct MixtureFamily {};

/// Diagonal covariance (d^gamma, 1, ..., 1).
struct SpikedFamily {
    double gamma = 1.0;
};

/// Mixing weight on the F component shrinks as scale * n^gamma / sqrt(n).
struct PitmanSchedule {
    double scale = 5.0;
    double gamma = 0.0;
};

/// (1 - delta) F + delta G. With a schedule, delta_n = 1 - scale n^gamma / sqrt(n)
/// is evaluated at sampling time from n.
struct ContaminatedFamily {
    double delta = 0.0;
    std::optional<PitmanSchedule> schedule;
    std::shared_ptr<const DistributionSpec> f;
    std::shared_ptr<const DistributionSpec> g;

    double delta_for(std::size_t n) const;
};

struct DistributionSpec {
    std::size_t d = 1;
    std::variant<GaussianFamily, StudentTFamily, LpSymmetricFamily, AngularFamily, MixtureFamily,
                 SpikedFamily, ContaminatedFamily>
        family;
};

// Validating constructors. All throw InvalidArgument on out-of-range input.
DistributionSpec make_gaussian(std::size_t d, double rho = 0.0);
DistributionSpec make_gaussian(const Eigen::MatrixXd& sigma);
DistributionSpec make_student_t(std::size_t d, double nu, double rho = 0.0);
DistributionSpec make_lp_symmetric(std::size_t d, LpSymmetricFamily::Norm norm,
                                   double radius_lo = 9.0, double radius_hi = 10.0);
DistributionSpec make_angular(std::size_t d = 5);
DistributionSpec make_mixture(std::size_t d = 5);
DistributionSpec make_spiked(std::size_t d, double gamma);
DistributionSpec make_contaminated(double delta, DistributionSpec f, DistributionSpec g);
DistributionSpec make_contaminated(PitmanSchedule schedule, DistributionSpec f, DistributionSpec g);
/// Local alternative in R^d: G = N(0, I), F = N(0, 0.5 I + 0.5 J).
DistributionSpec make_pitman(std::size_t d, double gamma, double scale = 5.0);

/// n i.i.d. rows. Deterministic given the stream state.
Sample sample(const DistributionSpec& spec, std::size_t n, RngStream& rng);

/// Parses a dimension-free descriptor such as "gaussian(rho=0.5)",
/// "t(nu=4)", "lp(p=inf)" or "contaminated(delta=0.5, f=gaussian(diag=[4 1]), g=gaussian)"
/// for dimension d. Throws ParseError or InvalidArgument.
DistributionSpec parse_distribution(std::string_view text, std::size_t d);

/// Canonical descriptor; parse_distribution(format_distribution(s), s.d)
/// reproduces s.
std::string format_distribution(const DistributionSpec& spec);

/// Shortest round-trip decimal form used in descriptors and CSV output.
std::string format_number(double value);

}  // namespace sphsym
