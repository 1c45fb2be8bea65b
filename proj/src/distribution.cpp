#include "idfunc/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "idfunc/quadrature.hpp"
#include "idfunc/special.hpp"

namespace idfunc {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_prob(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) throw Error(std::string(what) + ": level must lie in (0,1)");
}

/// Smallest x with pred(x) true, for a monotone (false->true) predicate.
template <class Pred>
double monotone_threshold(Pred&& pred) {
    double lo = -1.0, hi = 1.0;
    int guard = 0;
    while (!pred(hi)) {
        hi = hi * 2.0 + 1.0;
        if (++guard > 1200) throw Error("monotone_threshold: no upper bracket");
    }
    guard = 0;
    while (pred(lo)) {
        lo = lo * 2.0 - 1.0;
        if (++guard > 1200) throw Error("monotone_threshold: no lower bracket");
    }
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (pred(mid) ? hi : lo) = mid;
    }
    return hi;
}

// Marsaglia-Tsang gamma(shape, 1) sampler.
double draw_gamma(double shape, RandomStream& stream) {
    if (shape < 1.0) {
        const double u = stream.uniform01();
        return draw_gamma(shape + 1.0, stream) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = norm_quantile(stream.uniform01());
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.uniform01();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// construction

ScalarDistribution ScalarDistribution::normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw Error("normal: sigma must be positive");
    ScalarDistribution d;
    d.family_ = Family::normal;
    d.params_ = {mu, sigma};
    return d;
}

ScalarDistribution ScalarDistribution::exponential(double rate) {
    if (!(rate > 0.0)) throw Error("exponential: rate must be positive");
    ScalarDistribution d;
    d.family_ = Family::exponential;
    d.params_ = {rate};
    return d;
}

ScalarDistribution ScalarDistribution::uniform(double a, double b) {
    if (!(a < b)) throw Error("uniform: need a < b");
    ScalarDistribution d;
    d.family_ = Family::uniform;
    d.params_ = {a, b};
    return d;
}

ScalarDistribution ScalarDistribution::student_t(double dof, double loc, double scale) {
    if (!(dof > 0.0) || !(scale > 0.0)) throw Error("student_t: dof and scale must be positive");
    ScalarDistribution d;
    d.family_ = Family::student_t;
    d.params_ = {dof, loc, scale};
    return d;
}

ScalarDistribution ScalarDistribution::discrete(std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty()) throw Error("discrete: needs at least one atom");
    std::sort(atoms.begin(), atoms.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& [x, p] : atoms) {
        if (p < -kProbTol) throw Error("discrete: negative atom probability");
        if (!merged.empty() && merged.back().first == x)
            merged.back().second += p;
        else
            merged.emplace_back(x, p);
    }
    double total = 0.0;
    for (const auto& [x, p] : merged) {
        if (!std::isfinite(x)) throw Error("discrete: non-finite atom location");
        total += p;
    }
    if (std::abs(total - 1.0) > kProbTol) throw Error("discrete: probabilities must sum to 1");
    ScalarDistribution d;
    d.family_ = Family::discrete_atoms;
    d.atoms_ = std::move(merged);
    return d;
}

ScalarDistribution ScalarDistribution::mixture(std::vector<ScalarDistribution> components,
                                               Vec weights) {
    if (components.empty() || components.size() != weights.size())
        throw Error("mixture: components and weights must be nonempty and match");
    double total = 0.0;
    for (double w : weights) {
        if (w < -kProbTol) throw Error("mixture: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > kProbTol) throw Error("mixture: weights must sum to 1");

    ScalarDistribution d;
    d.family_ = Family::mixture;
    // flatten nested mixtures so atom enumeration stays simple
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i].family_ == Family::mixture) {
            for (std::size_t j = 0; j < components[i].components_.size(); ++j) {
                d.components_.push_back(components[i].components_[j]);
                d.weights_.push_back(weights[i] * components[i].weights_[j]);
            }
        } else {
            d.components_.push_back(
                std::make_shared<const ScalarDistribution>(std::move(components[i])));
            d.weights_.push_back(weights[i]);
        }
    }
    return d;
}

ScalarDistribution ScalarDistribution::mix(const ScalarDistribution& f,
                                           const ScalarDistribution& g, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("mix: lambda must lie in [0,1]");
    if (lambda == 0.0) return f;
    if (lambda == 1.0) return g;
    return mixture({f, g}, {1.0 - lambda, lambda});
}

// ---------------------------------------------------------------------------
// CDF and inverses

double ScalarDistribution::cdf(double y) const {
    switch (family_) {
        case Family::normal:
            return norm_cdf((y - params_[0]) / params_[1]);
        case Family::exponential:
            return y <= 0.0 ? 0.0 : -std::expm1(-params_[0] * y);
        case Family::uniform: {
            const double a = params_[0], b = params_[1];
            if (y <= a) return 0.0;
            if (y >= b) return 1.0;
            return (y - a) / (b - a);
        }
        case Family::student_t:
            return student_t_cdf((y - params_[1]) / params_[2], params_[0]);
        case Family::discrete_atoms: {
            double s = 0.0;
            for (const auto& [x, p] : atoms_) {
                if (x > y) break;
                s += p;
            }
            return s;
        }
        case Family::mixture: {
            double s = 0.0;
            for (std::size_t i = 0; i < components_.size(); ++i)
                s += weights_[i] * components_[i]->cdf(y);
            return s;
        }
    }
    throw Error("cdf: unknown family");
}

double ScalarDistribution::cdf_left(double y) const {
    switch (family_) {
        case Family::discrete_atoms: {
            double s = 0.0;
            for (const auto& [x, p] : atoms_) {
                if (x >= y) break;
                s += p;
            }
            return s;
        }
        case Family::mixture: {
            double s = 0.0;
            for (std::size_t i = 0; i < components_.size(); ++i)
                s += weights_[i] * components_[i]->cdf_left(y);
            return s;
        }
        default:
            return cdf(y);
    }
}

double ScalarDistribution::atom_mass(double y) const {
    switch (family_) {
        case Family::discrete_atoms:
            for (const auto& [x, p] : atoms_)
                if (x == y) return p;
            return 0.0;
        case Family::mixture: {
            double s = 0.0;
            for (std::size_t i = 0; i < components_.size(); ++i)
                s += weights_[i] * components_[i]->atom_mass(y);
            return s;
        }
        default:
            return 0.0;
    }
}

double ScalarDistribution::quantile(double u) const {
    check_prob(u, "quantile");
    switch (family_) {
        case Family::normal:
            return params_[0] + params_[1] * norm_quantile(u);
        case Family::exponential:
            return -std::log1p(-u) / params_[0];
        case Family::uniform:
            return params_[0] + (params_[1] - params_[0]) * u;
        case Family::student_t:
        case Family::mixture:
            return monotone_threshold([&](double x) { return cdf(x) >= u; });
        case Family::discrete_atoms: {
            double c = 0.0;
            for (const auto& [x, p] : atoms_) {
                c += p;
                if (c >= u - kProbTol) return x;
            }
            return atoms_.back().first;
        }
    }
    throw Error("quantile: unknown family");
}

Interval ScalarDistribution::quantile_set(double alpha) const {
    check_prob(alpha, "quantile_set");
    switch (family_) {
        case Family::normal:
        case Family::exponential:
        case Family::uniform:
        case Family::student_t:
            // strictly increasing CDF on the support: a point
            return Interval::point(quantile(alpha));
        case Family::discrete_atoms: {
            double c = 0.0;
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                c += atoms_[i].second;
                if (c >= alpha - kProbTol) {
                    const double lo = atoms_[i].first;
                    // flat CDF between atoms i and i+1 when c == alpha
                    if (std::abs(c - alpha) <= kProbTol && i + 1 < atoms_.size())
                        return {lo, atoms_[i + 1].first};
                    return Interval::point(lo);
                }
            }
            return Interval::point(atoms_.back().first);
        }
        case Family::mixture: {
            const double lo = monotone_threshold([&](double x) { return cdf(x) >= alpha; });
            double hi = monotone_threshold([&](double x) { return cdf(x) > alpha; });
            if (hi - lo <= 1e-12 * (1.0 + std::abs(lo))) hi = lo;
            return {lo, hi};
        }
    }
    throw Error("quantile_set: unknown family");
}

// ---------------------------------------------------------------------------
// moments

double ScalarDistribution::mean() const {
    switch (family_) {
        case Family::normal:
            return params_[0];
        case Family::exponential:
            return 1.0 / params_[0];
        case Family::uniform:
            return 0.5 * (params_[0] + params_[1]);
        case Family::student_t:
            if (params_[0] <= 1.0)
                throw UnsupportedMomentError("student_t: mean requires dof > 1");
            return params_[1];
        case Family::discrete_atoms: {
            double s = 0.0;
            for (const auto& [x, p] : atoms_) s += x * p;
            return s;
        }
        case Family::mixture: {
            double s = 0.0;
            for (std::size_t i = 0; i < components_.size(); ++i)
                s += weights_[i] * components_[i]->mean();
            return s;
        }
    }
    throw Error("mean: unknown family");
}

double ScalarDistribution::variance() const {
    switch (family_) {
        case Family::normal:
            return params_[1] * params_[1];
        case Family::exponential:
            return 1.0 / (params_[0] * params_[0]);
        case Family::uniform: {
            const double w = params_[1] - params_[0];
            return w * w / 12.0;
        }
        case Family::student_t: {
            const double dof = params_[0];
            if (dof <= 2.0) throw UnsupportedMomentError("student_t: variance requires dof > 2");
            return params_[2] * params_[2] * dof / (dof - 2.0);
        }
        case Family::discrete_atoms: {
            const double m = mean();
            double s = 0.0;
            for (const auto& [x, p] : atoms_) s += (x - m) * (x - m) * p;
            return s;
        }
        case Family::mixture: {
            // law of total variance
            const double m = mean();
            double s = 0.0;
            for (std::size_t i = 0; i < components_.size(); ++i) {
                const double mi = components_[i]->mean();
                s += weights_[i] * (components_[i]->variance() + (mi - m) * (mi - m));
            }
            return s;
        }
    }
    throw Error("variance: unknown family");
}

double ScalarDistribution::partial_expectation(double c) const {
    if (std::isnan(c)) throw Error("partial_expectation: NaN threshold");
    if (c == kInf) return mean();
    if (c == -kInf) return 0.0;
    switch (family_) {
        case Family::normal: {
            const double mu = params_[0], sigma = params_[1];
            const double z = (c - mu) / sigma;
            return mu * norm_cdf(z) - sigma * norm_pdf(z);
        }
        case Family::exponential: {
            const double rate = params_[0];
            if (c <= 0.0) return 0.0;
            // int_0^c y rate e^{-rate y} dy
            return (-std::expm1(-rate * c) - rate * c * std::exp(-rate * c)) / rate;
        }
        case Family::uniform: {
            const double a = params_[0], b = params_[1];
            if (c <= a) return 0.0;
            if (c >= b) return mean();
            return (c * c - a * a) / (2.0 * (b - a));
        }
        case Family::student_t: {
            const double dof = params_[0], loc = params_[1], scale = params_[2];
            if (dof <= 1.0)
                throw UnsupportedMomentError("student_t: partial expectation requires dof > 1");
            const double z = (c - loc) / scale;
            const double tail = -(dof + z * z) / (dof - 1.0) * student_t_pdf(z, dof);
            return loc * student_t_cdf(z, dof) + scale * tail;
        }
        case Family::discrete_atoms: {
            double s = 0.0;
            for (const auto& [x, p] : atoms_) {
                if (x > c) break;
                s += x * p;
            }
            return s;
        }
        case Family::mixture: {
            double s = 0.0;
            for (std::size_t i = 0; i < components_.size(); ++i)
                s += weights_[i] * components_[i]->partial_expectation(c);
            return s;
        }
    }
    throw Error("partial_expectation: unknown family");
}

double ScalarDistribution::es_lower(double alpha) const {
    check_prob(alpha, "es_lower");

    // Quantile-average form.
    double quantile_avg;
    if (family_ == Family::discrete_atoms) {
        // VaR_beta is a step function of beta: integrate it exactly.
        double acc = 0.0, cum = 0.0;
        for (const auto& [x, p] : atoms_) {
            const double lo = cum;
            cum += p;
            if (lo >= alpha) break;
            acc += x * (std::min(cum, alpha) - lo);
        }
        quantile_avg = acc / alpha;
    } else {
        std::vector<double> splits;
        for (const auto& [x, p] : atom_list()) {
            (void)x;
            const double at = cdf_left(x);
            if (at > 0.0 && at < alpha) splits.push_back(at);
            const double to = cdf(x);
            if (to > 0.0 && to < alpha) splits.push_back(to);
        }
        QuadratureOptions opts;
        opts.abs_tol = 1e-11;
        opts.rel_tol = 1e-11;
        const double beta_lo = std::nextafter(0.0, 1.0);
        quantile_avg =
            integrate([&](double beta) { return quantile(std::max(beta, beta_lo)); }, 0.0,
                      alpha, opts, splits) /
            alpha;
    }

    // Truncated expectation with the jump correction.
    const double var = var_lower(alpha);
    const double truncated =
        partial_expectation(var) / alpha - var / alpha * (cdf(var) - alpha);

    const double scale = std::max({1.0, std::abs(quantile_avg), std::abs(truncated)});
    if (std::abs(quantile_avg - truncated) > 1e-8 * scale)
        throw Error("es_lower: quantile-average and truncated-expectation forms disagree");
    return quantile_avg;
}

std::vector<std::pair<double, double>> ScalarDistribution::atom_list() const {
    switch (family_) {
        case Family::discrete_atoms:
            return atoms_;
        case Family::mixture: {
            std::vector<std::pair<double, double>> all;
            for (std::size_t i = 0; i < components_.size(); ++i)
                for (const auto& [x, p] : components_[i]->atom_list())
                    all.emplace_back(x, weights_[i] * p);
            std::sort(all.begin(), all.end());
            std::vector<std::pair<double, double>> merged;
            for (const auto& [x, p] : all) {
                if (!merged.empty() && merged.back().first == x)
                    merged.back().second += p;
                else
                    merged.emplace_back(x, p);
            }
            return merged;
        }
        default:
            return {};
    }
}

// ---------------------------------------------------------------------------
// sampling

double ScalarDistribution::draw(RandomStream& stream) const {
    switch (family_) {
        case Family::normal:
            return params_[0] + params_[1] * norm_quantile(stream.uniform01());
        case Family::exponential:
            return -std::log1p(-stream.uniform01()) / params_[0];
        case Family::uniform:
            return params_[0] + (params_[1] - params_[0]) * stream.uniform01();
        case Family::student_t: {
            const double dof = params_[0];
            const double z = norm_quantile(stream.uniform01());
            const double chi2 = 2.0 * draw_gamma(0.5 * dof, stream);
            return params_[1] + params_[2] * z / std::sqrt(chi2 / dof);
        }
        case Family::discrete_atoms: {
            const double u = stream.uniform01();
            double c = 0.0;
            for (const auto& [x, p] : atoms_) {
                c += p;
                if (u <= c) return x;
            }
            return atoms_.back().first;
        }
        case Family::mixture: {
            const double u = stream.uniform01();
            double c = 0.0;
            for (std::size_t i = 0; i < components_.size(); ++i) {
                c += weights_[i];
                if (u <= c) return components_[i]->draw(stream);
            }
            return components_.back()->draw(stream);
        }
    }
    throw Error("draw: unknown family");
}

std::vector<double> ScalarDistribution::sample(std::size_t n, std::uint64_t seed) const {
    if (n == 0) throw Error("sample: n must be at least 1");
    RandomStream stream(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = draw(stream);
    return out;
}

std::string ScalarDistribution::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::normal:
            os << "normal(" << params_[0] << "," << params_[1] << ")";
            break;
        case Family::exponential:
            os << "exponential(" << params_[0] << ")";
            break;
        case Family::uniform:
            os << "uniform(" << params_[0] << "," << params_[1] << ")";
            break;
        case Family::student_t:
            os << "student-t(" << params_[0] << "," << params_[1] << "," << params_[2] << ")";
            break;
        case Family::discrete_atoms: {
            os << "atoms{";
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (i) os << ",";
                os << "(" << atoms_[i].first << "," << atoms_[i].second << ")";
            }
            os << "}";
            break;
        }
        case Family::mixture: {
            os << "mixture[";
            for (std::size_t i = 0; i < components_.size(); ++i) {
                if (i) os << " + ";
                os << weights_[i] << "*" << components_[i]->describe();
            }
            os << "]";
            break;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// bivariate

namespace {

/// P(Z1 < z1, Z2 < z2) for standard bivariate normal with correlation
/// rho, by integrating the conditional normal CDF along z1. Accuracy is
/// driven by the quadrature tolerance (~1e-12).
double bvn_lower(double z1, double z2, double rho) {
    if (rho == 0.0) return norm_cdf(z1) * norm_cdf(z2);
    if (rho >= 1.0 - 1e-12) return norm_cdf(std::min(z1, z2));
    if (rho <= -1.0 + 1e-12) return std::max(0.0, norm_cdf(z1) + norm_cdf(z2) - 1.0);

    const double s = std::sqrt(1.0 - rho * rho);
    const double lo = -9.5;
    const double hi = std::min(z1, 9.5);
    if (hi <= lo) return 0.0;
    QuadratureOptions opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-12;
    return integrate(
        [&](double t) { return norm_pdf(t) * norm_cdf((z2 - rho * t) / s); }, lo, hi, opts);
}

}  // namespace

BivariateDistribution BivariateDistribution::gaussian(Vec mean, Matrix covariance) {
    if (mean.size() != 2 || covariance.rows() != 2 || covariance.cols() != 2)
        throw DimensionMismatchError("bivariate gaussian: mean must be 2-vector, cov 2x2");
    const double scale = std::max(1.0, max_abs(covariance));
    if (std::abs(covariance(0, 1) - covariance(1, 0)) > 1e-12 * scale)
        throw Error("bivariate gaussian: covariance not symmetric");
    if (!(covariance(0, 0) > 0.0) || !(covariance(1, 1) > 0.0))
        throw Error("bivariate gaussian: variances must be positive");
    const double rho =
        covariance(0, 1) / std::sqrt(covariance(0, 0) * covariance(1, 1));
    if (std::abs(rho) > 1.0 + 1e-12)
        throw Error("bivariate gaussian: covariance not positive semi-definite");

    BivariateDistribution d;
    d.family_ = Family::gaussian;
    d.mean_ = std::move(mean);
    d.cov_ = std::move(covariance);
    d.rho_ = std::clamp(rho, -1.0, 1.0);
    return d;
}

BivariateDistribution BivariateDistribution::discrete(
    std::vector<std::array<double, 3>> atoms) {
    if (atoms.empty()) throw Error("bivariate discrete: needs at least one atom");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (a[2] < -kProbTol) throw Error("bivariate discrete: negative probability");
        total += a[2];
    }
    if (std::abs(total - 1.0) > kProbTol)
        throw Error("bivariate discrete: probabilities must sum to 1");
    BivariateDistribution d;
    d.family_ = Family::discrete_atoms;
    d.atoms_ = std::move(atoms);
    return d;
}

double BivariateDistribution::quadrant_prob(Quadrant q, double x1, double x2) const {
    if (family_ == Family::discrete_atoms) {
        double s = 0.0;
        for (const auto& a : atoms_) {
            const bool low1 = a[0] < x1;
            const bool low2 = a[1] < x2;
            const bool in = (q == Quadrant::lower_lower && low1 && low2) ||
                            (q == Quadrant::lower_upper && low1 && !low2) ||
                            (q == Quadrant::upper_lower && !low1 && low2) ||
                            (q == Quadrant::upper_upper && !low1 && !low2);
            if (in) s += a[2];
        }
        return s;
    }
    const double s1 = std::sqrt(cov_(0, 0));
    const double s2 = std::sqrt(cov_(1, 1));
    const double z1 = (x1 - mean_[0]) / s1;
    const double z2 = (x2 - mean_[1]) / s2;
    const double ll = bvn_lower(z1, z2, rho_);
    const double p1 = norm_cdf(z1);
    const double p2 = norm_cdf(z2);
    switch (q) {
        case Quadrant::lower_lower:
            return ll;
        case Quadrant::lower_upper:
            return p1 - ll;
        case Quadrant::upper_lower:
            return p2 - ll;
        case Quadrant::upper_upper:
            return 1.0 - p1 - p2 + ll;
    }
    throw Error("quadrant_prob: unknown quadrant");
}

double BivariateDistribution::joint_cdf(double x1, double x2) const {
    if (family_ == Family::discrete_atoms) {
        double s = 0.0;
        for (const auto& a : atoms_)
            if (a[0] <= x1 && a[1] <= x2) s += a[2];
        return s;
    }
    return quadrant_prob(Quadrant::lower_lower, x1, x2);
}

double BivariateDistribution::marginal_cdf(int coord, double x) const {
    if (coord != 0 && coord != 1) throw DimensionMismatchError("marginal_cdf: coord in {0,1}");
    if (family_ == Family::discrete_atoms) {
        double s = 0.0;
        for (const auto& a : atoms_)
            if (a[coord] <= x) s += a[2];
        return s;
    }
    return norm_cdf((x - mean_[coord]) / std::sqrt(cov_(coord, coord)));
}

double BivariateDistribution::marginal_lower(int coord, double x) const {
    if (coord != 0 && coord != 1)
        throw DimensionMismatchError("marginal_lower: coord in {0,1}");
    if (family_ == Family::discrete_atoms) {
        double s = 0.0;
        for (const auto& a : atoms_)
            if (a[coord] < x) s += a[2];
        return s;
    }
    return marginal_cdf(coord, x);
}

double BivariateDistribution::marginal_quantile(int coord, double u) const {
    check_prob(u, "marginal_quantile");
    if (family_ == Family::discrete_atoms)
        return monotone_threshold([&](double x) { return marginal_cdf(coord, x) >= u; });
    return mean_[coord] + std::sqrt(cov_(coord, coord)) * norm_quantile(u);
}

std::array<double, 2> BivariateDistribution::draw(RandomStream& stream) const {
    if (family_ == Family::discrete_atoms) {
        const double u = stream.uniform01();
        double c = 0.0;
        for (const auto& a : atoms_) {
            c += a[2];
            if (u <= c) return {a[0], a[1]};
        }
        return {atoms_.back()[0], atoms_.back()[1]};
    }
    const double z1 = norm_quantile(stream.uniform01());
    const double z2 = norm_quantile(stream.uniform01());
    const double s1 = std::sqrt(cov_(0, 0));
    const double s2 = std::sqrt(cov_(1, 1));
    const double s = std::sqrt(std::max(0.0, 1.0 - rho_ * rho_));
    return {mean_[0] + s1 * z1, mean_[1] + s2 * (rho_ * z1 + s * z2)};
}

std::vector<std::array<double, 2>> BivariateDistribution::sample(std::size_t n,
                                                                 std::uint64_t seed) const {
    if (n == 0) throw Error("sample: n must be at least 1");
    RandomStream stream(seed);
    std::vector<std::array<double, 2>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = draw(stream);
    return out;
}

std::string BivariateDistribution::describe() const {
    std::ostringstream os;
    if (family_ == Family::gaussian) {
        os << "gaussian2(mean=[" << mean_[0] << "," << mean_[1] << "],cov=[["
           << cov_(0, 0) << "," << cov_(0, 1) << "],[" << cov_(1, 0) << "," << cov_(1, 1)
           << "]])";
    } else {
        os << "atoms2{" << atoms_.size() << " atoms}";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// variant helpers

int obs_dim(const AnyDistribution& f) {
    return std::holds_alternative<ScalarDistribution>(f) ? 1 : 2;
}

std::string describe(const AnyDistribution& f) {
    return std::visit([](const auto& d) { return d.describe(); }, f);
}

const ScalarDistribution& as_scalar(const AnyDistribution& f) {
    if (!std::holds_alternative<ScalarDistribution>(f))
        throw DimensionMismatchError("expected a scalar distribution");
    return std::get<ScalarDistribution>(f);
}

const BivariateDistribution& as_bivariate(const AnyDistribution& f) {
    if (!std::holds_alternative<BivariateDistribution>(f))
        throw DimensionMismatchError("expected a bivariate distribution");
    return std::get<BivariateDistribution>(f);
}

double bivariate_tail_prob(const BivariateDistribution& f, double x1, double x2, Quadrant q) {
    return f.quadrant_prob(q, x1, x2);
}

}  // namespace idfunc
