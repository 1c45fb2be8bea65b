#include "idfunc/identification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace idfunc {

namespace {

void check_level(double a, const char* what) {
    if (!(a > 0.0 && a < 1.0)) throw Error(std::string(what) + ": level must lie in (0,1)");
}

std::string level_suffix(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", a);
    return buf;
}

double indicator_le(double y, double x) { return y <= x ? 1.0 : 0.0; }

/// Ramp replacement for 1{y <= x} with half-width delta.
double ramp_le(double y, double x, double delta) {
    if (delta <= 0.0) return indicator_le(y, x);
    const double t = (x - y) / (2.0 * delta) + 0.5;
    return std::clamp(t, 0.0, 1.0);
}

void require_dims(const IdentificationFunction& v, const Vec& x, const Vec& y) {
    if (static_cast<int>(x.size()) != v.domain().dim())
        throw DimensionMismatchError(v.key() + ": action point has wrong dimension");
    if (static_cast<int>(y.size()) != v.obs_dim())
        throw DimensionMismatchError(v.key() + ": observation has wrong dimension");
}

}  // namespace

// ---------------------------------------------------------------------------
// action domain

bool ActionDomain::contains(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_) return false;
    for (double c : x)
        if (!std::isfinite(c)) return false;
    switch (kind_) {
        case Kind::all:
            return true;
        case Kind::x1_ge_x2:
            return x[0] >= x[1];
        case Kind::x2_nonneg:
            return x[1] >= 0.0;
    }
    return false;
}

bool ActionDomain::interior_contains(const Vec& x) const {
    if (!contains(x)) return false;
    switch (kind_) {
        case Kind::all:
            return true;
        case Kind::x1_ge_x2:
            return x[0] > x[1];
        case Kind::x2_nonneg:
            return x[1] > 0.0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// pointwise formulas

double v_mean(double x, double y) { return x - y; }

double v_expectile(double tau, double x, double y) {
    return 2.0 * std::abs(indicator_le(y, x) - tau) * (x - y);
}

double v_quantile(double alpha, double x, double y) {
    return indicator_le(y, x) - alpha;
}

Vec v_mean_var(const Vec& x, double y) {
    return {x[0] - y, x[1] - (y - x[0]) * (y - x[0])};
}

Vec v_mean_var_prime(const Vec& x, double y) {
    return {x[0] - y, x[1] + x[0] * x[0] - y * y};
}

Vec v_quantile_es(double alpha, const Vec& x, double y) {
    const double hit = indicator_le(y, x[0]);
    return {hit - alpha, x[1] - y / alpha * hit};
}

Vec v_quantile_es_prime(double alpha, const Vec& x, double y) {
    const double hit = indicator_le(y, x[0]);
    return {hit - alpha, x[1] - y / alpha * hit + x[0] / alpha * (hit - alpha)};
}

Vec v_var_covar(double alpha, double beta, const Vec& x, const Vec& y) {
    const double exceed1 = x[0] <= y[0] ? 1.0 : 0.0;
    const double below1 = 1.0 - exceed1;  // 1{x1 > y1}
    const double exceed2 = x[1] <= y[1] ? 1.0 : 0.0;
    return {exceed1 - beta, below1 * (exceed2 - alpha)};
}

double v_covar_1d(double alpha, double beta, const Vec& x, const Vec& y) {
    const double both_below = (x[0] > y[0] && x[1] > y[1]) ? 1.0 : 0.0;
    return both_below - (1.0 - alpha) * (1.0 - beta);
}

// ---------------------------------------------------------------------------
// catalog classes

namespace {

class MeanId final : public IdentificationFunction {
public:
    MeanId() : domain_(ActionDomain::all_of(1)) {}
    int output_dim() const override { return 1; }
    int obs_dim() const override { return 1; }
    const ActionDomain& domain() const override { return domain_; }
    std::string key() const override { return "mean"; }
    Vec evaluate(const Vec& x, const Vec& y) const override {
        require_dims(*this, x, y);
        return {v_mean(x[0], y[0])};
    }
    Vec expected(const Vec& x, const AnyDistribution& f) const override {
        return {x[0] - as_scalar(f).mean()};
    }

private:
    ActionDomain domain_;
};

class ExpectileId final : public IdentificationFunction {
public:
    explicit ExpectileId(double tau) : tau_(tau), domain_(ActionDomain::all_of(1)) {
        check_level(tau, "expectile");
    }
    int output_dim() const override { return 1; }
    int obs_dim() const override { return 1; }
    const ActionDomain& domain() const override { return domain_; }
    std::string key() const override { return "expectile:" + level_suffix(tau_); }
    Vec evaluate(const Vec& x, const Vec& y) const override {
        require_dims(*this, x, y);
        return {v_expectile(tau_, x[0], y[0])};
    }
    Vec evaluate_smoothed(const Vec& x, const Vec& y, double delta) const override {
        const double s = ramp_le(y[0], x[0], delta);
        const double w = tau_ + s * (1.0 - 2.0 * tau_);
        return {2.0 * w * (x[0] - y[0])};
    }
    Vec expected(const Vec& x, const AnyDistribution& fd) const override {
        const ScalarDistribution& f = as_scalar(fd);
        const double c = x[0];
        const double low = c * f.cdf(c) - f.partial_expectation(c);   // E[(x-Y)1{Y<=x}]
        const double up = c * (1.0 - f.cdf(c)) - (f.mean() - f.partial_expectation(c));
        return {2.0 * (1.0 - tau_) * low + 2.0 * tau_ * up};
    }
    std::vector<double> discontinuities(const Vec& x) const override { return {x[0]}; }
    double tau() const { return tau_; }

private:
    double tau_;
    ActionDomain domain_;
};

class QuantileId final : public IdentificationFunction {
public:
    explicit QuantileId(double alpha) : alpha_(alpha), domain_(ActionDomain::all_of(1)) {
        check_level(alpha, "quantile");
    }
    int output_dim() const override { return 1; }
    int obs_dim() const override { return 1; }
    const ActionDomain& domain() const override { return domain_; }
    std::string key() const override { return "quantile:" + level_suffix(alpha_); }
    Vec evaluate(const Vec& x, const Vec& y) const override {
        require_dims(*this, x, y);
        return {v_quantile(alpha_, x[0], y[0])};
    }
    Vec evaluate_smoothed(const Vec& x, const Vec& y, double delta) const override {
        return {ramp_le(y[0], x[0], delta) - alpha_};
    }
    Vec expected(const Vec& x, const AnyDistribution& f) const override {
        return {as_scalar(f).cdf(x[0]) - alpha_};
    }
    std::vector<double> discontinuities(const Vec& x) const override { return {x[0]}; }
    double alpha() const { return alpha_; }

private:
    double alpha_;
    ActionDomain domain_;
};

class MeanVarId final : public IdentificationFunction {
public:
    MeanVarId(bool prime, bool unrestricted)
        : prime_(prime),
          domain_(unrestricted ? ActionDomain::all_of(2) : ActionDomain::upper_half()) {}
    int output_dim() const override { return 2; }
    int obs_dim() const override { return 1; }
    const ActionDomain& domain() const override { return domain_; }
    std::string key() const override { return prime_ ? "mean-var-prime" : "mean-var"; }
    Vec evaluate(const Vec& x, const Vec& y) const override {
        require_dims(*this, x, y);
        return prime_ ? v_mean_var_prime(x, y[0]) : v_mean_var(x, y[0]);
    }
    Vec expected(const Vec& x, const AnyDistribution& fd) const override {
        const ScalarDistribution& f = as_scalar(fd);
        const double mu = f.mean();
        const double var = f.variance();
        if (prime_) return {x[0] - mu, x[1] + x[0] * x[0] - (var + mu * mu)};
        return {x[0] - mu, x[1] - (var + (mu - x[0]) * (mu - x[0]))};
    }

private:
    bool prime_;
    ActionDomain domain_;
};

class QuantileEsId final : public IdentificationFunction {
public:
    QuantileEsId(double alpha, bool prime)
        : alpha_(alpha), prime_(prime), domain_(ActionDomain::half_plane()) {
        check_level(alpha, "quantile-es");
    }
    int output_dim() const override { return 2; }
    int obs_dim() const override { return 1; }
    const ActionDomain& domain() const override { return domain_; }
    std::string key() const override {
        return (prime_ ? "quantile-es-prime:" : "quantile-es:") + level_suffix(alpha_);
    }
    Vec evaluate(const Vec& x, const Vec& y) const override {
        require_dims(*this, x, y);
        return prime_ ? v_quantile_es_prime(alpha_, x, y[0]) : v_quantile_es(alpha_, x, y[0]);
    }
    Vec evaluate_smoothed(const Vec& x, const Vec& y, double delta) const override {
        const double s = ramp_le(y[0], x[0], delta);
        Vec out{s - alpha_, x[1] - y[0] / alpha_ * s};
        if (prime_) out[1] += x[0] / alpha_ * (s - alpha_);
        return out;
    }
    Vec expected(const Vec& x, const AnyDistribution& fd) const override {
        const ScalarDistribution& f = as_scalar(fd);
        const double hit_prob = f.cdf(x[0]);
        Vec out{hit_prob - alpha_, x[1] - f.partial_expectation(x[0]) / alpha_};
        if (prime_) out[1] += x[0] / alpha_ * (hit_prob - alpha_);
        return out;
    }
    std::vector<double> discontinuities(const Vec& x) const override { return {x[0]}; }
    double alpha() const { return alpha_; }

private:
    double alpha_;
    bool prime_;
    ActionDomain domain_;
};

class VarCovarId final : public IdentificationFunction {
public:
    VarCovarId(double alpha, double beta)
        : alpha_(alpha), beta_(beta), domain_(ActionDomain::all_of(2)) {
        check_level(alpha, "var-covar");
        check_level(beta, "var-covar");
    }
    int output_dim() const override { return 2; }
    int obs_dim() const override { return 2; }
    const ActionDomain& domain() const override { return domain_; }
    std::string key() const override {
        return "var-covar:" + level_suffix(alpha_) + "," + level_suffix(beta_);
    }
    Vec evaluate(const Vec& x, const Vec& y) const override {
        require_dims(*this, x, y);
        return v_var_covar(alpha_, beta_, x, y);
    }
    Vec evaluate_smoothed(const Vec& x, const Vec& y, double delta) const override {
        const double exceed1 = ramp_le(x[0], y[0], delta);  // smooth 1{x1 <= y1}
        const double exceed2 = ramp_le(x[1], y[1], delta);
        return {exceed1 - beta_, (1.0 - exceed1) * (exceed2 - alpha_)};
    }
    Vec expected(const Vec& x, const AnyDistribution& fd) const override {
        const BivariateDistribution& f = as_bivariate(fd);
        const double below1 = f.marginal_lower(0, x[0]);  // P(Y1 < x1)
        const double lu = f.quadrant_prob(Quadrant::lower_upper, x[0], x[1]);
        return {1.0 - below1 - beta_, lu - alpha_ * below1};
    }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

private:
    double alpha_;
    double beta_;
    ActionDomain domain_;
};

class Covar1dId final : public IdentificationFunction {
public:
    Covar1dId(double alpha, double beta)
        : alpha_(alpha), beta_(beta), domain_(ActionDomain::all_of(2)) {
        check_level(alpha, "covar-1d");
        check_level(beta, "covar-1d");
    }
    int output_dim() const override { return 1; }
    int obs_dim() const override { return 2; }
    const ActionDomain& domain() const override { return domain_; }
    std::string key() const override {
        return "covar-1d:" + level_suffix(alpha_) + "," + level_suffix(beta_);
    }
    Vec evaluate(const Vec& x, const Vec& y) const override {
        require_dims(*this, x, y);
        return {v_covar_1d(alpha_, beta_, x, y)};
    }
    Vec evaluate_smoothed(const Vec& x, const Vec& y, double delta) const override {
        const double b1 = 1.0 - ramp_le(x[0], y[0], delta);
        const double b2 = 1.0 - ramp_le(x[1], y[1], delta);
        return {b1 * b2 - (1.0 - alpha_) * (1.0 - beta_)};
    }
    Vec expected(const Vec& x, const AnyDistribution& fd) const override {
        const BivariateDistribution& f = as_bivariate(fd);
        const double ll = f.quadrant_prob(Quadrant::lower_lower, x[0], x[1]);
        return {ll - (1.0 - alpha_) * (1.0 - beta_)};
    }

private:
    double alpha_;
    double beta_;
    ActionDomain domain_;
};

}  // namespace

IdFuncPtr make_mean() { return std::make_shared<MeanId>(); }
IdFuncPtr make_expectile(double tau) { return std::make_shared<ExpectileId>(tau); }
IdFuncPtr make_quantile(double alpha) { return std::make_shared<QuantileId>(alpha); }
IdFuncPtr make_mean_var(bool prime, bool unrestricted_domain) {
    return std::make_shared<MeanVarId>(prime, unrestricted_domain);
}
IdFuncPtr make_quantile_es(double alpha, bool prime) {
    return std::make_shared<QuantileEsId>(alpha, prime);
}
IdFuncPtr make_var_covar(double alpha, double beta) {
    return std::make_shared<VarCovarId>(alpha, beta);
}
IdFuncPtr make_covar_1d(double alpha, double beta) {
    return std::make_shared<Covar1dId>(alpha, beta);
}

IdFuncPtr make_catalog(const std::string& key) {
    const auto colon = key.find(':');
    const std::string name = key.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::string rest = key.substr(colon + 1);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            std::size_t used = 0;
            try {
                args.push_back(std::stod(rest.substr(pos), &used));
            } catch (const std::exception&) {
                throw ParseError("catalog key '" + key + "': bad numeric parameter");
            }
            pos += used;
            if (pos < rest.size()) {
                if (rest[pos] != ',') throw ParseError("catalog key '" + key + "': expected ','");
                ++pos;
            }
        }
    }
    auto want = [&](std::size_t n) {
        if (args.size() != n)
            throw ParseError("catalog key '" + key + "': expected " + std::to_string(n) +
                             " parameter(s)");
    };
    if (name == "mean") {
        want(0);
        return make_mean();
    }
    if (name == "expectile") {
        want(1);
        return make_expectile(args[0]);
    }
    if (name == "quantile") {
        want(1);
        return make_quantile(args[0]);
    }
    if (name == "mean-var") {
        want(0);
        return make_mean_var(false);
    }
    if (name == "mean-var-prime") {
        want(0);
        return make_mean_var(true);
    }
    if (name == "quantile-es") {
        want(1);
        return make_quantile_es(args[0], false);
    }
    if (name == "quantile-es-prime") {
        want(1);
        return make_quantile_es(args[0], true);
    }
    if (name == "var-covar") {
        want(2);
        return make_var_covar(args[0], args[1]);
    }
    if (name == "covar-1d") {
        want(2);
        return make_covar_1d(args[0], args[1]);
    }
    throw ParseError("unknown catalog key '" + key + "'");
}

// ---------------------------------------------------------------------------
// lambda-defined functions and quadrature fallback

LambdaIdentificationFunction::LambdaIdentificationFunction(std::string key, int output_dim,
                                                           int obs_dim, ActionDomain domain,
                                                           EvalFn eval, ExpectedFn expected,
                                                           BreaksFn breaks)
    : key_(std::move(key)),
      output_dim_(output_dim),
      obs_dim_(obs_dim),
      domain_(domain),
      eval_(std::move(eval)),
      expected_(std::move(expected)),
      breaks_(std::move(breaks)) {}

Vec LambdaIdentificationFunction::evaluate(const Vec& x, const Vec& y) const {
    require_dims(*this, x, y);
    return eval_(x, y);
}

Vec LambdaIdentificationFunction::expected(const Vec& x, const AnyDistribution& f) const {
    if (expected_) return expected_(x, f);
    return expected_via_quadrature(*this, x, as_scalar(f));
}

std::vector<double> LambdaIdentificationFunction::discontinuities(const Vec& x) const {
    return breaks_ ? breaks_(x) : std::vector<double>{};
}

Vec expected_v(const IdentificationFunction& v, const Vec& x, const AnyDistribution& f) {
    if (obs_dim(f) != v.obs_dim())
        throw DimensionMismatchError(v.key() + ": distribution dimension mismatch");
    return v.expected(x, f);
}

Vec expected_via_quadrature(const IdentificationFunction& v, const Vec& x,
                            const ScalarDistribution& f, QuadratureOptions opts) {
    // Split the unit interval at the CDF images of every jump of
    // V(x, .) and at atom levels of F; naive quadrature does not
    // converge across those lines.
    std::vector<double> splits;
    auto add_split = [&](double u) {
        if (u > 0.0 && u < 1.0) splits.push_back(u);
    };
    for (double b : v.discontinuities(x)) {
        add_split(f.cdf_left(b));
        add_split(f.cdf(b));
    }
    for (const auto& [a, p] : f.atom_list()) {
        (void)p;
        add_split(f.cdf_left(a));
        add_split(f.cdf(a));
    }

    // deep subdivision can round a node onto an endpoint; keep the
    // evaluation strictly inside the open interval
    const double lo = std::nextafter(0.0, 1.0);
    const double hi = std::nextafter(1.0, 0.0);
    Vec out(v.output_dim());
    for (int j = 0; j < v.output_dim(); ++j) {
        out[j] = integrate(
            [&](double u) {
                Vec yy{f.quantile(std::clamp(u, lo, hi))};
                return v.evaluate(x, yy)[j];
            },
            0.0, 1.0, opts, splits);
    }
    return out;
}

}  // namespace idfunc
