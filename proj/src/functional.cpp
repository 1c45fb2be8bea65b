#include "idfunc/functional.hpp"

#include <cmath>
#include <cstdio>

namespace idfunc {

namespace {

std::string fmt_level(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", a);
    return buf;
}

/// Root of a continuous strictly monotone increasing function.
template <class Fn>
double increasing_root(Fn&& g) {
    double lo = -1.0, hi = 1.0;
    int guard = 0;
    while (g(hi) < 0.0) {
        hi = hi * 2.0 + 1.0;
        if (++guard > 1200) throw Error("increasing_root: no upper bracket");
    }
    guard = 0;
    while (g(lo) > 0.0) {
        lo = lo * 2.0 - 1.0;
        if (++guard > 1200) throw Error("increasing_root: no lower bracket");
    }
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double expectile_value(const ScalarDistribution& f, double tau) {
    const double mu = f.mean();
    auto moment = [&](double x) {
        const double low = x * f.cdf(x) - f.partial_expectation(x);
        const double up = x * (1.0 - f.cdf(x)) - (mu - f.partial_expectation(x));
        return 2.0 * (1.0 - tau) * low + 2.0 * tau * up;
    };
    return increasing_root(moment);
}

}  // namespace

FunctionalSpec FunctionalSpec::mean() { return {Tag::mean, 0.0, 0.0}; }
FunctionalSpec FunctionalSpec::expectile(double tau) { return {Tag::expectile, tau, 0.0}; }
FunctionalSpec FunctionalSpec::quantile(double alpha) { return {Tag::quantile, alpha, 0.0}; }
FunctionalSpec FunctionalSpec::mean_variance() { return {Tag::mean_variance, 0.0, 0.0}; }
FunctionalSpec FunctionalSpec::quantile_es(double alpha) { return {Tag::quantile_es, alpha, 0.0}; }
FunctionalSpec FunctionalSpec::var_covar(double alpha, double beta) {
    return {Tag::var_covar, alpha, beta};
}
FunctionalSpec FunctionalSpec::variance_only() { return {Tag::variance, 0.0, 0.0}; }
FunctionalSpec FunctionalSpec::es_only(double alpha) { return {Tag::es, alpha, 0.0}; }

int FunctionalSpec::dim() const {
    switch (tag_) {
        case Tag::mean:
        case Tag::expectile:
        case Tag::quantile:
        case Tag::variance:
        case Tag::es:
            return 1;
        default:
            return 2;
    }
}

std::string FunctionalSpec::key() const {
    switch (tag_) {
        case Tag::mean:
            return "mean";
        case Tag::expectile:
            return "expectile:" + fmt_level(alpha_);
        case Tag::quantile:
            return "quantile:" + fmt_level(alpha_);
        case Tag::mean_variance:
            return "mean-var";
        case Tag::quantile_es:
            return "quantile-es:" + fmt_level(alpha_);
        case Tag::var_covar:
            return "var-covar:" + fmt_level(alpha_) + "," + fmt_level(beta_);
        case Tag::variance:
            return "variance";
        case Tag::es:
            return "es:" + fmt_level(alpha_);
    }
    return "?";
}

std::vector<Interval> FunctionalSpec::value(const AnyDistribution& fd) const {
    switch (tag_) {
        case Tag::mean:
            return {Interval::point(as_scalar(fd).mean())};
        case Tag::expectile:
            return {Interval::point(expectile_value(as_scalar(fd), alpha_))};
        case Tag::quantile:
            return {as_scalar(fd).quantile_set(alpha_)};
        case Tag::mean_variance: {
            const ScalarDistribution& f = as_scalar(fd);
            return {Interval::point(f.mean()), Interval::point(f.variance())};
        }
        case Tag::quantile_es: {
            const ScalarDistribution& f = as_scalar(fd);
            return {f.quantile_set(alpha_), Interval::point(f.es_lower(alpha_))};
        }
        case Tag::var_covar: {
            const BivariateDistribution& f = as_bivariate(fd);
            // x1 with P(Y1 >= x1) = beta, i.e. the upper-beta marginal quantile
            const double x1 = f.marginal_quantile(0, 1.0 - beta_);
            const double below = f.marginal_lower(0, x1);
            // x2 with P(Y2 >= x2 | Y1 < x1) = alpha; the left-hand side is
            // decreasing in x2
            const double x2 = increasing_root([&](double t) {
                return alpha_ * below - f.quadrant_prob(Quadrant::lower_upper, x1, t);
            });
            return {Interval::point(x1), Interval::point(x2)};
        }
        case Tag::variance:
            return {Interval::point(as_scalar(fd).variance())};
        case Tag::es:
            return {Interval::point(as_scalar(fd).es_lower(alpha_))};
    }
    throw Error("FunctionalSpec::value: unknown tag");
}

Vec FunctionalSpec::point_value(const AnyDistribution& f) const {
    Vec out;
    for (const Interval& iv : value(f)) out.push_back(iv.lo);
    return out;
}

std::vector<Interval> functional_value(const FunctionalSpec& t, const AnyDistribution& f) {
    return t.value(f);
}

FunctionalSpec functional_for(const std::string& catalog_key) {
    const IdFuncPtr v = make_catalog(catalog_key);  // validates key and parameters
    const std::string name = catalog_key.substr(0, catalog_key.find(':'));
    // reparse the parameters through the canonical key
    const std::string canon = v->key();
    const auto colon = canon.find(':');
    double a = 0.0, b = 0.0;
    if (colon != std::string::npos) {
        const std::string rest = canon.substr(colon + 1);
        const auto comma = rest.find(',');
        a = std::stod(rest.substr(0, comma));
        if (comma != std::string::npos) b = std::stod(rest.substr(comma + 1));
    }
    if (name == "mean") return FunctionalSpec::mean();
    if (name == "expectile") return FunctionalSpec::expectile(a);
    if (name == "quantile") return FunctionalSpec::quantile(a);
    if (name == "mean-var" || name == "mean-var-prime") return FunctionalSpec::mean_variance();
    if (name == "quantile-es" || name == "quantile-es-prime")
        return FunctionalSpec::quantile_es(a);
    if (name == "var-covar" || name == "covar-1d") return FunctionalSpec::var_covar(a, b);
    throw ParseError("no functional for catalog key '" + catalog_key + "'");
}

}  // namespace idfunc
