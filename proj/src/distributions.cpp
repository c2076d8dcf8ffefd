#include "sphsym/distributions.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "sphsym/augment.hpp"
#include "sphsym/error.hpp"

namespace sphsym {

namespace {

void check_dim(std::size_t d) {
    if (d < 1) throw InvalidArgument("dimension must be at least 1");
}

void check_rho(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in [0, 1)");
}

Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& sigma) {
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    // Singular PSD: symmetric square root.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    if (eig.eigenvalues().minCoeff() < -1e-10)
        throw InvalidArgument("covariance is not positive semidefinite");
    return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

double ContaminatedFamily::delta_for(std::size_t n) const {
    if (!schedule) return delta;
    const double weight =
        schedule->scale * std::pow(static_cast<double>(n), schedule->gamma) /
        std::sqrt(static_cast<double>(n));
    if (!(weight >= 0.0 && weight <= 1.0))
        throw InvalidArgument("mixing weight scale * n^gamma / sqrt(n) = " + format_number(weight) +
                              " lies outside [0, 1] at n = " + std::to_string(n));
    return 1.0 - weight;
}

DistributionSpec make_gaussian(std::size_t d, double rho) {
    check_dim(d);
    check_rho(rho);
    GaussianFamily g;
    g.rho = rho;
    return {d, g};
}

DistributionSpec make_gaussian(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() < 1 || sigma.rows() != sigma.cols())
        throw InvalidArgument("covariance must be a non-empty square matrix");
    if (!sigma.allFinite() || (sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw InvalidArgument("covariance must be finite and symmetric");
    GaussianFamily g;
    g.sigma = sigma;
    g.factor = covariance_factor(sigma);
    return {static_cast<std::size_t>(sigma.rows()), g};
}

DistributionSpec make_student_t(std::size_t d, double nu, double rho) {
    check_dim(d);
    check_rho(rho);
    if (!(nu >= 1.0) || !std::isfinite(nu)) throw InvalidArgument("nu must be at least 1");
    return {d, StudentTFamily{nu, rho}};
}

DistributionSpec make_lp_symmetric(std::size_t d, LpSymmetricFamily::Norm norm, double radius_lo,
                                   double radius_hi) {
    check_dim(d);
    if (!(radius_lo >= 0.0 && radius_lo < radius_hi) || !std::isfinite(radius_hi))
        throw InvalidArgument("radial bounds must satisfy 0 <= lo < hi");
    return {d, LpSymmetricFamily{norm, radius_lo, radius_hi}};
}

DistributionSpec make_angular(std::size_t d) {
    if (d != 5) throw InvalidArgument("the angular family is defined for d = 5 only");
    return {d, AngularFamily{}};
}

DistributionSpec make_mixture(std::size_t d) {
    if (d != 5) throw InvalidArgument("the four-component mixture is defined for d = 5 only");
    return {d, MixtureFamily{}};
}

DistributionSpec make_spiked(std::size_t d, double gamma) {
    check_dim(d);
    if (!std::isfinite(gamma)) throw InvalidArgument("spike exponent must be finite");
    return {d, SpikedFamily{gamma}};
}

DistributionSpec make_contaminated(double delta, DistributionSpec f, DistributionSpec g) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidArgument("delta must lie in [0, 1]");
    if (f.d != g.d) throw InvalidArgument("mixture components have different dimensions");
    ContaminatedFamily c;
    c.delta = delta;
    c.f = std::make_shared<const DistributionSpec>(std::move(f));
    c.g = std::make_shared<const DistributionSpec>(std::move(g));
    const std::size_t d = c.f->d;
    return {d, std::move(c)};
}

DistributionSpec make_contaminated(PitmanSchedule schedule, DistributionSpec f, DistributionSpec g) {
    if (!(schedule.scale >= 0.0) || !std::isfinite(schedule.gamma))
        throw InvalidArgument("schedule needs scale >= 0 and finite gamma");
    auto spec = make_contaminated(0.0, std::move(f), std::move(g));
    std::get<ContaminatedFamily>(spec.family).schedule = schedule;
    return spec;
}

DistributionSpec make_pitman(std::size_t d, double gamma, double scale) {
    return make_contaminated(PitmanSchedule{scale, gamma}, make_gaussian(d, 0.5), make_gaussian(d));
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

void equicorrelated_normal(std::span<double> out, double rho, RngStream& rng) {
    const double a = std::sqrt(1.0 - rho);
    for (auto& v : out) v = a * rng.normal();
    if (rho > 0.0) {
        const double shared = std::sqrt(rho) * rng.normal();
        for (auto& v : out) v += shared;
    }
}

double laplace(RngStream& rng) {
    const double u = rng.uniform() - 0.5;
    return u < 0.0 ? std::log1p(2.0 * u) : -std::log1p(-2.0 * u);
}

struct RowSampler {
    std::size_t d;
    RngStream& rng;
    std::span<double> row;

    void operator()(const GaussianFamily& g) const {
        if (!g.sigma) {
            equicorrelated_normal(row, g.rho, rng);
            return;
        }
        Eigen::VectorXd z(static_cast<Eigen::Index>(d));
        for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
        const Eigen::VectorXd x = g.factor * z;
        for (std::size_t k = 0; k < d; ++k) row[k] = x(static_cast<Eigen::Index>(k));
    }

    void operator()(const StudentTFamily& t) const {
        equicorrelated_normal(row, t.rho, rng);
        const double w = rng.chi_squared(t.nu);
        const double scale = 1.0 / std::sqrt(w / t.nu);
        for (auto& v : row) v *= scale;
    }

    void operator()(const LpSymmetricFamily& lp) const {
        double norm = 0.0;
        if (lp.norm == LpSymmetricFamily::Norm::linf) {
            for (auto& v : row) {
                v = rng.uniform(-1.0, 1.0);
                norm = std::max(norm, std::abs(v));
            }
        } else {
            for (auto& v : row) {
                v = laplace(rng);
                norm += std::abs(v);
            }
        }
        const double r = rng.uniform(lp.radius_lo, lp.radius_hi);
        for (auto& v : row) v = r * (v / norm);
    }

    void operator()(const AngularFamily&) const {
        const auto u = sample_unit_sphere(d, rng);
        double theta = 100.0;
        if (u[0] * u[1] > 0.0)
            theta = 10.0;
        else if (u[2] * u[3] * u[4] > 0.0)
            theta = 50.0;
        const double r = rng.uniform(0.0, theta);
        for (std::size_t k = 0; k < d; ++k) row[k] = r * u[k];
    }

    void operator()(const MixtureFamily&) const {
        static constexpr std::array<double, 5> beta{1.0, -1.0, 1.0, -1.0, 1.0};
        const auto component = rng.below(4);
        for (std::size_t k = 0; k < d; ++k) {
            const double mu = component < 2 ? 1.0 : beta[k];
            const double sign = (component % 2 == 0) ? 1.0 : -1.0;
            row[k] = sign * mu + rng.normal();
        }
    }

    void operator()(const SpikedFamily& s) const {
        for (auto& v : row) v = rng.normal();
        row[0] *= std::sqrt(std::pow(static_cast<double>(d), s.gamma));
    }

    void operator()(const ContaminatedFamily&) const {}  // handled in sample()
};

}  // namespace

Sample sample(const DistributionSpec& spec, std::size_t n, RngStream& rng) {
    if (n < 1) throw InvalidArgument("sample size must be at least 1");
    const std::size_t d = spec.d;

    if (const auto* c = std::get_if<ContaminatedFamily>(&spec.family)) {
        const double delta = c->delta_for(n);
        if (delta == 0.0) return sample(*c->f, n, rng);
        if (delta == 1.0) return sample(*c->g, n, rng);
        std::vector<bool> from_g(n);
        std::size_t count_g = 0;
        for (std::size_t i = 0; i < n; ++i) {
            from_g[i] = rng.uniform() < delta;
            count_g += from_g[i] ? 1 : 0;
        }
        const std::size_t count_f = n - count_g;
        std::vector<double> data(n * d);
        std::optional<Sample> part_f, part_g;
        if (count_f > 0) part_f = sample(*c->f, count_f, rng);
        if (count_g > 0) part_g = sample(*c->g, count_g, rng);
        std::size_t next_f = 0, next_g = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto src = from_g[i] ? part_g->row(next_g++) : part_f->row(next_f++);
            std::copy(src.begin(), src.end(), data.begin() + static_cast<std::ptrdiff_t>(i * d));
        }
        return Sample(std::move(data), n, d);
    }

    std::vector<double> data(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        const RowSampler sampler{d, rng, std::span<double>(data.data() + i * d, d)};
        std::visit(sampler, spec.family);
    }
    return Sample(std::move(data), n, d);
}

// ---------------------------------------------------------------------------
// Descriptor text

std::string format_number(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

namespace {

class DescriptorParser {
public:
    explicit DescriptorParser(std::string_view text) : text_(text) {}

    struct Value;
    using Args = std::vector<std::pair<std::string, Value>>;

    struct Node {
        std::string name;
        std::shared_ptr<Args> args;
    };

    struct Value {
        std::variant<double, std::vector<std::vector<double>>, Node> v;
    };

    Node parse_root() {
        Node node = parse_node();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing text");
        return node;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("distribution '" + std::string(text_) + "': " + what + " at offset " +
                         std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string identifier() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                text_[pos_] == '-'))
            ++pos_;
        if (start == pos_) fail("expected a name");
        return std::string(text_.substr(start, pos_ - start));
    }

    double number() {
        skip_ws();
        if (text_.substr(pos_).starts_with("inf")) {
            pos_ += 3;
            return std::numeric_limits<double>::infinity();
        }
        double v = 0.0;
        const char* first = text_.data() + pos_;
        const auto res = std::from_chars(first, text_.data() + text_.size(), v);
        if (res.ec != std::errc()) fail("expected a number");
        pos_ += static_cast<std::size_t>(res.ptr - first);
        return v;
    }

    std::vector<std::vector<double>> matrix() {
        std::vector<std::vector<double>> rows(1);
        for (;;) {
            skip_ws();
            if (consume(']')) break;
            if (consume(';')) {
                rows.emplace_back();
                continue;
            }
            consume(',');
            rows.back().push_back(number());
        }
        return rows;
    }

    Node parse_node() {
        Node node{identifier(), std::make_shared<Args>()};
        if (!consume('(')) return node;
        if (consume(')')) return node;
        do {
            std::string key = identifier();
            if (!consume('=')) fail("expected '=' after '" + key + "'");
            skip_ws();
            Value value;
            if (consume('[')) {
                value.v = matrix();
            } else if (pos_ < text_.size() &&
                       (std::isalpha(static_cast<unsigned char>(text_[pos_]))) &&
                       !text_.substr(pos_).starts_with("inf")) {
                value.v = parse_node();
            } else {
                value.v = number();
            }
            node.args->emplace_back(std::move(key), std::move(value));
        } while (consume(','));
        if (!consume(')')) fail("expected ')'");
        return node;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

using Node = DescriptorParser::Node;

class ArgReader {
public:
    explicit ArgReader(const Node& node) : node_(node) {
        for (const auto& [k, v] : *node.args) {
            if (!seen_.emplace(k, &v).second)
                throw ParseError("duplicate argument '" + k + "' in " + node.name);
        }
    }

    std::optional<double> scalar(const std::string& key) {
        auto it = take(key);
        if (!it) return std::nullopt;
        if (const auto* d = std::get_if<double>(&it->v)) return *d;
        throw ParseError("argument '" + key + "' of " + node_.name + " must be a number");
    }

    std::optional<std::vector<std::vector<double>>> matrix(const std::string& key) {
        auto it = take(key);
        if (!it) return std::nullopt;
        if (const auto* m = std::get_if<std::vector<std::vector<double>>>(&it->v)) return *m;
        throw ParseError("argument '" + key + "' of " + node_.name + " must be a [..] list");
    }

    std::optional<Node> node(const std::string& key) {
        auto it = take(key);
        if (!it) return std::nullopt;
        if (const auto* n = std::get_if<Node>(&it->v)) return *n;
        throw ParseError("argument '" + key + "' of " + node_.name + " must be a distribution");
    }

    void finish() const {
        for (const auto& [k, v] : seen_)
            if (!used_.count(k))
                throw ParseError("unknown argument '" + k + "' for " + node_.name);
    }

private:
    const DescriptorParser::Value* take(const std::string& key) {
        auto it = seen_.find(key);
        if (it == seen_.end()) return nullptr;
        used_[key] = true;
        return it->second;
    }

    const Node& node_;
    std::map<std::string, const DescriptorParser::Value*> seen_;
    std::map<std::string, bool> used_;
};

DistributionSpec build(const Node& node, std::size_t d) {
    ArgReader args(node);
    DistributionSpec spec;
    const std::string& name = node.name;
    if (name == "gaussian" || name == "normal") {
        const auto rho = args.scalar("rho");
        const auto diag = args.matrix("diag");
        const auto full = args.matrix("sigma");
        if ((rho ? 1 : 0) + (diag ? 1 : 0) + (full ? 1 : 0) > 1)
            throw ParseError("gaussian takes at most one of rho, diag, sigma");
        if (diag) {
            if (diag->size() != 1 || diag->front().size() != d)
                throw InvalidArgument("gaussian diag needs exactly d = " + std::to_string(d) +
                                      " entries");
            Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                                      static_cast<Eigen::Index>(d));
            for (std::size_t k = 0; k < d; ++k)
                s(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = diag->front()[k];
            spec = make_gaussian(s);
        } else if (full) {
            if (full->size() != d) throw InvalidArgument("gaussian sigma needs d rows");
            Eigen::MatrixXd s(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            for (std::size_t r = 0; r < d; ++r) {
                if ((*full)[r].size() != d) throw InvalidArgument("gaussian sigma needs d columns");
                for (std::size_t c = 0; c < d; ++c)
                    s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (*full)[r][c];
            }
            spec = make_gaussian(s);
        } else {
            spec = make_gaussian(d, rho.value_or(0.0));
        }
    } else if (name == "t" || name == "cauchy") {
        const double nu = name == "cauchy" ? 1.0 : args.scalar("nu").value_or(4.0);
        spec = make_student_t(d, nu, args.scalar("rho").value_or(0.0));
    } else if (name == "lp") {
        const auto p = args.scalar("p");
        if (!p) throw ParseError("lp needs p=1 or p=inf");
        LpSymmetricFamily::Norm norm;
        if (std::isinf(*p) && *p > 0)
            norm = LpSymmetricFamily::Norm::linf;
        else if (*p == 1.0)
            norm = LpSymmetricFamily::Norm::l1;
        else
            throw InvalidArgument("lp supports p = 1 and p = inf only");
        double lo = 9.0, hi = 10.0;
        if (const auto radial = args.matrix("radial")) {
            if (radial->size() != 1 || radial->front().size() != 2)
                throw InvalidArgument("lp radial needs [lo hi]");
            lo = radial->front()[0];
            hi = radial->front()[1];
        }
        spec = make_lp_symmetric(d, norm, lo, hi);
    } else if (name == "angular") {
        spec = make_angular(d);
    } else if (name == "mixture4") {
        spec = make_mixture(d);
    } else if (name == "spiked") {
        spec = make_spiked(d, args.scalar("gamma").value_or(1.0));
    } else if (name == "contaminated") {
        const auto f = args.node("f");
        const auto g = args.node("g");
        if (!f || !g) throw ParseError("contaminated needs f=... and g=...");
        const auto delta = args.scalar("delta");
        const auto gamma = args.scalar("gamma");
        const auto scale = args.scalar("scale");
        if (delta && (gamma || scale))
            throw ParseError("contaminated takes either delta or a gamma/scale schedule");
        if (delta)
            spec = make_contaminated(*delta, build(*f, d), build(*g, d));
        else if (gamma)
            spec = make_contaminated(PitmanSchedule{scale.value_or(5.0), *gamma}, build(*f, d),
                                     build(*g, d));
        else
            throw ParseError("contaminated needs delta=... or gamma=...");
    } else if (name == "pitman") {
        const auto gamma = args.scalar("gamma");
        if (!gamma) throw ParseError("pitman needs gamma=...");
        spec = make_pitman(d, *gamma, args.scalar("scale").value_or(5.0));
    } else {
        throw ParseError("unknown distribution family '" + name + "'");
    }
    args.finish();
    return spec;
}

std::string format_matrix_row(const Eigen::MatrixXd& m, Eigen::Index r) {
    std::string out;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out += ' ';
        out += format_number(m(r, c));
    }
    return out;
}

std::string format_family(const DistributionSpec& spec);

struct Formatter {
    const DistributionSpec& spec;

    std::string operator()(const GaussianFamily& g) const {
        if (g.sigma) {
            const auto& s = *g.sigma;
            const bool diagonal = s.isDiagonal(0.0);
            if (diagonal) {
                std::string out = "gaussian(diag=[";
                for (Eigen::Index k = 0; k < s.rows(); ++k) {
                    if (k) out += ' ';
                    out += format_number(s(k, k));
                }
                return out + "])";
            }
            std::string out = "gaussian(sigma=[";
            for (Eigen::Index r = 0; r < s.rows(); ++r) {
                if (r) out += "; ";
                out += format_matrix_row(s, r);
            }
            return out + "])";
        }
        if (g.rho == 0.0) return "gaussian";
        return "gaussian(rho=" + format_number(g.rho) + ")";
    }

    std::string operator()(const StudentTFamily& t) const {
        std::string out = t.nu == 1.0 ? "cauchy" : "t(nu=" + format_number(t.nu);
        if (t.rho != 0.0) out += (t.nu == 1.0 ? "(rho=" : ", rho=") + format_number(t.rho);
        if (t.nu != 1.0 || t.rho != 0.0) out += ")";
        return out;
    }

    std::string operator()(const LpSymmetricFamily& lp) const {
        std::string out = lp.norm == LpSymmetricFamily::Norm::linf ? "lp(p=inf" : "lp(p=1";
        if (lp.radius_lo != 9.0 || lp.radius_hi != 10.0)
            out += ", radial=[" + format_number(lp.radius_lo) + " " + format_number(lp.radius_hi) +
                   "]";
        return out + ")";
    }

    std::string operator()(const AngularFamily&) const { return "angular"; }
    std::string operator()(const MixtureFamily&) const { return "mixture4"; }

    std::string operator()(const SpikedFamily& s) const {
        return "spiked(gamma=" + format_number(s.gamma) + ")";
    }

    std::string operator()(const ContaminatedFamily& c) const {
        const std::string f = format_family(*c.f);
        const std::string g = format_family(*c.g);
        if (c.schedule) {
            if (f == "gaussian(rho=0.5)" && g == "gaussian") {
                std::string out = "pitman(gamma=" + format_number(c.schedule->gamma);
                if (c.schedule->scale != 5.0) out += ", scale=" + format_number(c.schedule->scale);
                return out + ")";
            }
            return "contaminated(gamma=" + format_number(c.schedule->gamma) +
                   ", scale=" + format_number(c.schedule->scale) + ", f=" + f + ", g=" + g + ")";
        }
        return "contaminated(delta=" + format_number(c.delta) + ", f=" + f + ", g=" + g + ")";
    }
};

std::string format_family(const DistributionSpec& spec) {
    return std::visit(Formatter{spec}, spec.family);
}

}  // namespace

DistributionSpec parse_distribution(std::string_view text, std::size_t d) {
    check_dim(d);
    DescriptorParser parser(text);
    return build(parser.parse_root(), d);
}

std::string format_distribution(const DistributionSpec& spec) { return format_family(spec); }

}  // namespace sphsym
