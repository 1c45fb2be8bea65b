#include <doctest.h>

#include <cmath>

#include "idfunc/functional.hpp"
#include "idfunc/identification.hpp"
#include "idfunc/rng.hpp"
#include "idfunc/special.hpp"
#include "support/oracles.hpp"

using namespace idfunc;

namespace {

const AnyDistribution kStdNormal{ScalarDistribution::normal(0.0, 1.0)};
const AnyDistribution kTwoAtoms{ScalarDistribution::discrete({{-1.0, 0.5}, {1.0, 0.5}})};

/// Monte Carlo oracle for expected moment vectors (scalar observations).
Vec mc_expected(const IdentificationFunction& v, const Vec& x, const ScalarDistribution& f,
                std::size_t n, std::uint64_t seed, Vec* se_out = nullptr) {
    RandomStream stream(seed);
    Vec sum(static_cast<std::size_t>(v.output_dim()), 0.0);
    Vec sumsq(static_cast<std::size_t>(v.output_dim()), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec val = v.evaluate(x, {f.draw(stream)});
        for (std::size_t j = 0; j < val.size(); ++j) {
            sum[j] += val[j];
            sumsq[j] += val[j] * val[j];
        }
    }
    Vec mean(sum.size());
    for (std::size_t j = 0; j < sum.size(); ++j) {
        mean[j] = sum[j] / static_cast<double>(n);
        if (se_out) {
            const double var =
                std::max(0.0, sumsq[j] / static_cast<double>(n) - mean[j] * mean[j]);
            (*se_out)[j] = std::sqrt(var / static_cast<double>(n));
        }
    }
    return mean;
}

}  // namespace

TEST_CASE("pointwise formulas at hand-checked points") {
    CHECK(v_mean(3.0, 1.0) == 2.0);
    CHECK(v_mean(1.5, 1.5) == 0.0);
    CHECK(v_expectile(0.9, 1.0, 2.0) == doctest::Approx(-1.8));
    CHECK(v_quantile(0.05, 0.0, -1.0) == doctest::Approx(0.95));
    const Vec mv = v_mean_var({2.0, 3.0}, 1.0);
    CHECK(mv[0] == 1.0);
    CHECK(mv[1] == 2.0);
    const Vec mvp = v_mean_var_prime({2.0, 3.0}, 1.0);
    CHECK(mvp[0] == 1.0);
    CHECK(mvp[1] == 6.0);
    const Vec qes = v_quantile_es(0.25, {0.0, 0.0}, 1.0);
    CHECK(qes[0] == doctest::Approx(-0.25));
    CHECK(qes[1] == doctest::Approx(0.0));
    const Vec qesp = v_quantile_es_prime(0.25, {0.0, 0.0}, 1.0);
    CHECK(qesp[0] == doctest::Approx(-0.25));
    CHECK(qesp[1] == doctest::Approx(0.0));
    const Vec vc = v_var_covar(0.05, 0.1, {1.0, 1.0}, {0.0, 2.0});
    CHECK(vc[0] == doctest::Approx(-0.1));
    CHECK(vc[1] == doctest::Approx(0.95));
    CHECK(v_covar_1d(0.05, 0.1, {0.0, 0.0}, {1.0, 1.0}) ==
          doctest::Approx(-(0.95 * 0.9)));
}

TEST_CASE("expectile at one half is the mean moment everywhere") {
    RandomStream stream(31);
    for (int i = 0; i < 10000; ++i) {
        const double x = 10.0 * (stream.uniform01() - 0.5);
        const double y = 10.0 * (stream.uniform01() - 0.5);
        CHECK(v_expectile(0.5, x, y) == doctest::Approx(v_mean(x, y)).epsilon(1e-15));
    }
}

TEST_CASE("shear identities hold to machine precision on random points") {
    RandomStream stream(101);
    const double alpha = 0.25;
    double worst_mv = 0.0, worst_qes = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec x{10.0 * (stream.uniform01() - 0.5), 10.0 * (stream.uniform01() - 0.5)};
        const double y = 10.0 * (stream.uniform01() - 0.5);

        const Vec lhs_mv = v_mean_var_prime(x, y);
        const Vec base_mv = v_mean_var(x, y);
        worst_mv = std::max(worst_mv,
                            std::abs(lhs_mv[0] - base_mv[0]));
        worst_mv = std::max(
            worst_mv, std::abs(lhs_mv[1] - (2.0 * x[0] * base_mv[0] + base_mv[1])));

        const Vec lhs_qes = v_quantile_es_prime(alpha, x, y);
        const Vec base_qes = v_quantile_es(alpha, x, y);
        worst_qes = std::max(worst_qes, std::abs(lhs_qes[0] - base_qes[0]));
        worst_qes = std::max(
            worst_qes,
            std::abs(lhs_qes[1] - (x[0] / alpha * base_qes[0] + base_qes[1])));
    }
    CHECK(worst_mv <= 1e-12);
    CHECK(worst_qes <= 1e-12);
}

TEST_CASE("expected values: closed forms against reference points") {
    const IdFuncPtr mean_fn = make_mean();
    CHECK(expected_v(*mean_fn, {1.0}, AnyDistribution{ScalarDistribution::normal(1.0, 2.0)})[0] ==
          doctest::Approx(0.0));

    // 0.5-expectile of the exponential equals its mean
    const IdFuncPtr ex = make_expectile(0.5);
    CHECK(expected_v(*ex, {1.0}, AnyDistribution{ScalarDistribution::exponential(1.0)})[0] ==
          doctest::Approx(0.0).epsilon(1e-12));

    const IdFuncPtr q25 = make_quantile(0.25);
    CHECK(expected_v(*q25, {-std::log(0.75)},
                     AnyDistribution{ScalarDistribution::exponential(1.0)})[0] ==
          doctest::Approx(0.0).epsilon(1e-12));
    // the atom case where the level is overshot
    CHECK(expected_v(*q25, {-1.0}, kTwoAtoms)[0] == doctest::Approx(0.25));

    const IdFuncPtr mv = make_mean_var();
    const AnyDistribution n14{ScalarDistribution::normal(1.0, 2.0)};
    Vec at_truth = expected_v(*mv, {1.0, 4.0}, n14);
    CHECK(inf_norm(at_truth) == doctest::Approx(0.0).epsilon(1e-12));
    Vec off = expected_v(*mv, {0.0, 4.0}, n14);
    CHECK(off[0] == doctest::Approx(-1.0));
    CHECK(off[1] == doctest::Approx(-1.0));

    const IdFuncPtr mvp = make_mean_var(true);
    CHECK(inf_norm(expected_v(*mvp, {1.0, 4.0}, n14)) == doctest::Approx(0.0).epsilon(1e-12));

    const IdFuncPtr qes = make_quantile_es(0.05);
    const double var05 = norm_quantile(0.05);
    const double es05 = -norm_pdf(var05) / 0.05;
    CHECK(inf_norm(expected_v(*qes, {var05, es05}, kStdNormal)) <= 1e-8);

    // hand computation on the two-point law: the truncated-expectation
    // component misses zero at the true pair while the corrected one
    // vanishes
    const IdFuncPtr qes25 = make_quantile_es(0.25);
    const Vec plain = expected_v(*qes25, {-1.0, -1.0}, kTwoAtoms);
    CHECK(plain[0] == doctest::Approx(0.25));
    CHECK(plain[1] == doctest::Approx(1.0));
    const IdFuncPtr qes25p = make_quantile_es(0.25, true);
    const Vec corrected = expected_v(*qes25p, {-1.0, -1.0}, kTwoAtoms);
    CHECK(corrected[0] == doctest::Approx(0.25));
    CHECK(corrected[1] == doctest::Approx(0.0));
}

TEST_CASE("expected values of the bivariate tail moments") {
    const BivariateDistribution ind =
        BivariateDistribution::gaussian({0.0, 0.0}, Matrix::identity(2));
    const AnyDistribution f{ind};

    const IdFuncPtr vc5 = make_var_covar(0.5, 0.5);
    CHECK(inf_norm(expected_v(*vc5, {0.0, 0.0}, f)) <= 1e-12);

    const IdFuncPtr vc = make_var_covar(0.05, 0.1);
    CHECK(inf_norm(expected_v(*vc, {1.281552, 1.644854}, f)) <= 1e-6);

    const IdFuncPtr c1 = make_covar_1d(0.05, 0.1);
    CHECK(std::abs(expected_v(*c1, {1.281552, 1.644854}, f)[0]) <= 1e-6);
    // the swapped point also zeroes the one-dimensional moment
    CHECK(std::abs(expected_v(*c1, {1.644854, 1.281552}, f)[0]) <= 1e-6);
    // ... but not the two-dimensional one
    CHECK(inf_norm(expected_v(*vc, {1.644854, 1.281552}, f)) >= 1e-3);
}

TEST_CASE("closed-form expected values agree with Monte Carlo") {
    struct Case {
        IdFuncPtr v;
        Vec x;
        ScalarDistribution f;
    };
    const std::vector<Case> cases = {
        {make_mean(), {0.7}, ScalarDistribution::normal(0.3, 1.4)},
        {make_expectile(0.7), {0.2}, ScalarDistribution::exponential(0.9)},
        {make_quantile(0.25), {-0.5}, ScalarDistribution::normal(0.0, 1.0)},
        {make_mean_var(), {0.5, 2.0}, ScalarDistribution::uniform(-1.0, 2.0)},
        {make_mean_var(true), {0.5, 2.0}, ScalarDistribution::normal(1.0, 2.0)},
        {make_quantile_es(0.25), {-0.6, -1.2},
         ScalarDistribution::mix(ScalarDistribution::normal(0.0, 1.0),
                                 ScalarDistribution::normal(1.5, 0.5), 0.4)},
        {make_quantile_es(0.25, true), {-0.6, -1.2}, ScalarDistribution::student_t(5.0)},
    };
    std::uint64_t seed = 1000;
    for (const Case& c : cases) {
        Vec se(static_cast<std::size_t>(c.v->output_dim()), 0.0);
        const Vec mc = mc_expected(*c.v, c.x, c.f, 1000000, seed++, &se);
        const Vec closed = expected_v(*c.v, c.x, AnyDistribution{c.f});
        for (std::size_t j = 0; j < closed.size(); ++j) {
            CHECK(std::abs(closed[j] - mc[j]) <= 3.0 * se[j] + 1e-12);
        }
    }
}

TEST_CASE("quadrature fallback matches the closed forms") {
    const ScalarDistribution mix = ScalarDistribution::mix(
        ScalarDistribution::normal(0.0, 1.0), ScalarDistribution::normal(2.0, 0.5), 0.3);
    for (const IdFuncPtr& v :
         {make_quantile(0.3), make_expectile(0.4), make_mean_var(),
          make_quantile_es(0.25), make_quantile_es(0.25, true)}) {
        Vec x;
        if (v->domain().dim() == 1) {
            x = {0.4};
        } else if (v->domain().kind() == ActionDomain::Kind::x1_ge_x2) {
            x = {0.4, -0.8};
        } else {
            x = {0.4, 1.5};
        }
        const Vec closed = expected_v(*v, x, AnyDistribution{mix});
        const Vec quad = expected_via_quadrature(*v, x, mix);
        for (std::size_t j = 0; j < closed.size(); ++j)
            CHECK(closed[j] == doctest::Approx(quad[j]).epsilon(1e-8));
    }

    // and across an atom-bearing law, where the splits matter
    const ScalarDistribution atoms =
        ScalarDistribution::mix(ScalarDistribution::normal(0.0, 1.0),
                                ScalarDistribution::discrete({{-0.5, 0.5}, {0.7, 0.5}}), 0.5);
    const IdFuncPtr q = make_quantile(0.4);
    CHECK(expected_v(*q, {-0.5}, AnyDistribution{atoms})[0] ==
          doctest::Approx(expected_via_quadrature(*q, {-0.5}, atoms)[0]).epsilon(1e-8));
}

TEST_CASE("functional values: points, intervals, pairs") {
    const FunctionalSpec mv = FunctionalSpec::mean_variance();
    const auto mv_val = mv.value(AnyDistribution{ScalarDistribution::normal(1.0, 2.0)});
    CHECK(mv_val[0].lo == doctest::Approx(1.0));
    CHECK(mv_val[1].lo == doctest::Approx(4.0));
    CHECK(mv_val[0].is_point(1e-12));

    const FunctionalSpec qes = FunctionalSpec::quantile_es(0.25);
    const auto qes_val = qes.value(kTwoAtoms);
    CHECK(qes_val[0].lo == doctest::Approx(-1.0));
    CHECK(qes_val[0].hi == doctest::Approx(-1.0));
    CHECK(qes_val[1].lo == doctest::Approx(-1.0));

    const FunctionalSpec q5 = FunctionalSpec::quantile(0.5);
    const auto flat =
        q5.value(AnyDistribution{ScalarDistribution::discrete({{0.0, 0.5}, {1.0, 0.5}})});
    CHECK(flat[0].lo == doctest::Approx(0.0));
    CHECK(flat[0].hi == doctest::Approx(1.0));

    // quantile-es pair respects the half-plane ordering
    const auto pair = qes.value(kStdNormal);
    CHECK(pair[1].lo <= pair[0].lo + 1e-12);

    // expectile root against a bisection oracle on the moment itself
    const ScalarDistribution expf = ScalarDistribution::exponential(1.0);
    const FunctionalSpec e7 = FunctionalSpec::expectile(0.7);
    const IdFuncPtr e7_fn = make_expectile(0.7);
    const double root = oracles::bisect_root(
        [&](double x) { return expected_v(*e7_fn, {x}, AnyDistribution{expf})[0]; }, -10.0,
        40.0);
    CHECK(e7.value(AnyDistribution{expf})[0].lo == doctest::Approx(root).epsilon(1e-9));

    // var-covar under independence: marginal upper quantiles
    const BivariateDistribution ind =
        BivariateDistribution::gaussian({0.0, 0.0}, Matrix::identity(2));
    const FunctionalSpec vc = FunctionalSpec::var_covar(0.05, 0.1);
    const auto vc_val = vc.value(AnyDistribution{ind});
    CHECK(vc_val[0].lo == doctest::Approx(norm_quantile(0.9)).epsilon(1e-9));
    CHECK(vc_val[1].lo == doctest::Approx(norm_quantile(0.95)).epsilon(1e-9));
}

TEST_CASE("catalog keys parse and round-trip") {
    for (const std::string key :
         {"mean", "expectile:0.7", "quantile:0.25", "mean-var", "mean-var-prime",
          "quantile-es:0.4", "quantile-es-prime:0.4", "var-covar:0.05,0.1",
          "covar-1d:0.05,0.1"}) {
        const IdFuncPtr v = make_catalog(key);
        CHECK(v->key() == key);
        (void)functional_for(key);
    }
    CHECK_THROWS_AS(make_catalog("quantile"), ParseError);
    CHECK_THROWS_AS(make_catalog("nope"), ParseError);
    CHECK_THROWS_AS(make_catalog("var-covar:0.5"), ParseError);
    CHECK(make_catalog("covar-1d:0.05,0.1")->output_dim() == 1);
    CHECK(make_catalog("covar-1d:0.05,0.1")->domain().dim() == 2);
}

TEST_CASE("action domains: membership and interior") {
    const ActionDomain half = ActionDomain::half_plane();
    CHECK(half.contains({1.0, 1.0}));
    CHECK(!half.interior_contains({1.0, 1.0}));
    CHECK(half.interior_contains({1.0, 0.0}));
    CHECK(!half.contains({0.0, 1.0}));

    const ActionDomain upper = ActionDomain::upper_half();
    CHECK(upper.contains({-3.0, 0.0}));
    CHECK(!upper.interior_contains({-3.0, 0.0}));
    CHECK(upper.interior_contains({-3.0, 0.5}));
    CHECK(!upper.contains({0.0, -0.1}));
}
