#pragma once

#include <functional>
#include <memory>
#include <string>

#include "idfunc/base.hpp"
#include "idfunc/distribution.hpp"
#include "idfunc/quadrature.hpp"

namespace idfunc {

/// Admissible forecast vectors. Evaluation of moment functions is
/// defined on the whole domain; transform recovery and related grid
/// operations restrict themselves to the interior.
class ActionDomain {
public:
    enum class Kind {
        all,        // R^k
        x1_ge_x2,   // {(x1,x2) : x1 >= x2}
        x2_nonneg,  // R x [0, inf)
    };

    ActionDomain(Kind kind, int dim) : kind_(kind), dim_(dim) {}
    static ActionDomain all_of(int dim) { return {Kind::all, dim}; }
    static ActionDomain half_plane() { return {Kind::x1_ge_x2, 2}; }
    static ActionDomain upper_half() { return {Kind::x2_nonneg, 2}; }

    int dim() const { return dim_; }
    Kind kind() const { return kind_; }

    bool contains(const Vec& x) const;
    bool interior_contains(const Vec& x) const;

private:
    Kind kind_;
    int dim_;
};

/// A moment (identification) function V: A x O -> R^k together with its
/// expected value under a distribution. The output dimension k may be
/// smaller than the action dimension (the one-dimensional tail moment
/// for the VaR/CoVaR pair is the catalog example).
class IdentificationFunction {
public:
    virtual ~IdentificationFunction() = default;

    virtual int output_dim() const = 0;
    virtual int obs_dim() const = 0;
    virtual const ActionDomain& domain() const = 0;
    virtual std::string key() const = 0;

    virtual Vec evaluate(const Vec& x, const Vec& y) const = 0;
    /// Componentwise integral of evaluate(x, .) against F, through
    /// closed-form distribution primitives wherever possible.
    virtual Vec expected(const Vec& x, const AnyDistribution& f) const = 0;

    /// Observation values where y -> evaluate(x, y) jumps.
    virtual std::vector<double> discontinuities(const Vec& x) const {
        (void)x;
        return {};
    }

    /// evaluate() with indicators replaced by ramps of half-width delta;
    /// smooth functions return evaluate() unchanged.
    virtual Vec evaluate_smoothed(const Vec& x, const Vec& y, double delta) const {
        (void)delta;
        return evaluate(x, y);
    }
};

using IdFuncPtr = std::shared_ptr<const IdentificationFunction>;

// ---- pointwise catalog formulas ----
double v_mean(double x, double y);
double v_expectile(double tau, double x, double y);
double v_quantile(double alpha, double x, double y);
Vec v_mean_var(const Vec& x, double y);
Vec v_mean_var_prime(const Vec& x, double y);
Vec v_quantile_es(double alpha, const Vec& x, double y);
Vec v_quantile_es_prime(double alpha, const Vec& x, double y);
Vec v_var_covar(double alpha, double beta, const Vec& x, const Vec& y);
double v_covar_1d(double alpha, double beta, const Vec& x, const Vec& y);

// ---- catalog constructors ----
IdFuncPtr make_mean();
IdFuncPtr make_expectile(double tau);
IdFuncPtr make_quantile(double alpha);
/// `unrestricted_domain` widens the action domain from R x [0,inf) to
/// all of R^2 (evaluation is defined there as well).
IdFuncPtr make_mean_var(bool prime = false, bool unrestricted_domain = false);
IdFuncPtr make_quantile_es(double alpha, bool prime = false);
IdFuncPtr make_var_covar(double alpha, double beta);
IdFuncPtr make_covar_1d(double alpha, double beta);

/// Resolve a catalog key: "mean", "expectile:TAU", "quantile:ALPHA",
/// "mean-var", "mean-var-prime", "quantile-es:ALPHA",
/// "quantile-es-prime:ALPHA", "var-covar:ALPHA,BETA",
/// "covar-1d:ALPHA,BETA".
IdFuncPtr make_catalog(const std::string& key);

/// Moment function defined by lambdas, for one-off constructions. When
/// no expected-value rule is supplied, expected values fall back to
/// adaptive quadrature on the quantile transform (scalar observations
/// only).
class LambdaIdentificationFunction final : public IdentificationFunction {
public:
    using EvalFn = std::function<Vec(const Vec&, const Vec&)>;
    using ExpectedFn = std::function<Vec(const Vec&, const AnyDistribution&)>;
    using BreaksFn = std::function<std::vector<double>(const Vec&)>;

    LambdaIdentificationFunction(std::string key, int output_dim, int obs_dim,
                                 ActionDomain domain, EvalFn eval,
                                 ExpectedFn expected = nullptr, BreaksFn breaks = nullptr);

    int output_dim() const override { return output_dim_; }
    int obs_dim() const override { return obs_dim_; }
    const ActionDomain& domain() const override { return domain_; }
    std::string key() const override { return key_; }
    Vec evaluate(const Vec& x, const Vec& y) const override;
    Vec expected(const Vec& x, const AnyDistribution& f) const override;
    std::vector<double> discontinuities(const Vec& x) const override;

private:
    std::string key_;
    int output_dim_;
    int obs_dim_;
    ActionDomain domain_;
    EvalFn eval_;
    ExpectedFn expected_;
    BreaksFn breaks_;
};

Vec expected_v(const IdentificationFunction& v, const Vec& x, const AnyDistribution& f);

/// Expected value by adaptive quadrature of u -> V(x, quantile(u)) over
/// (0,1), with splits at the CDF images of every discontinuity of
/// V(x, .) and of every atom of F.
Vec expected_via_quadrature(const IdentificationFunction& v, const Vec& x,
                            const ScalarDistribution& f, QuadratureOptions opts = {});

}  // namespace idfunc
