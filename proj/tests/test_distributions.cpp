#include <doctest.h>

#include <cmath>

#include "idfunc/distribution.hpp"
#include "idfunc/special.hpp"
#include "support/oracles.hpp"

using namespace idfunc;

namespace {

const ScalarDistribution kStdNormal = ScalarDistribution::normal(0.0, 1.0);
const ScalarDistribution kExp1 = ScalarDistribution::exponential(1.0);
const ScalarDistribution kTwoAtoms =
    ScalarDistribution::discrete({{-1.0, 0.5}, {1.0, 0.5}});

std::vector<ScalarDistribution> test_family() {
    return {
        kStdNormal,
        ScalarDistribution::normal(1.0, 2.0),
        kExp1,
        ScalarDistribution::uniform(0.0, 1.0),
        ScalarDistribution::uniform(-2.0, 3.0),
        ScalarDistribution::student_t(5.0),
        kTwoAtoms,
        ScalarDistribution::discrete({{0.0, 0.25}, {1.0, 0.25}, {2.0, 0.5}}),
        ScalarDistribution::mix(kStdNormal, ScalarDistribution::normal(2.0, 1.0), 0.5),
        ScalarDistribution::mix(kStdNormal, kTwoAtoms, 0.3),
        ScalarDistribution::mix(ScalarDistribution::uniform(0.0, 1.0),
                                ScalarDistribution::uniform(2.0, 3.0), 0.5),
    };
}

}  // namespace

TEST_CASE("cdf reference values") {
    CHECK(kStdNormal.cdf(0.0) == doctest::Approx(0.5));
    // closed form 1 - e^{-0.5}
    const double exp_oracle = -std::expm1(-0.5);
    CHECK(exp_oracle == doctest::Approx(0.393469).epsilon(1e-5));
    CHECK(kExp1.cdf(0.5) == doctest::Approx(exp_oracle).epsilon(1e-14));
    CHECK(kTwoAtoms.cdf(-1.0) == doctest::Approx(0.5));
    CHECK(kTwoAtoms.cdf_left(-1.0) == doctest::Approx(0.0));
    CHECK(kTwoAtoms.cdf(0.999) == doctest::Approx(0.5));
}

TEST_CASE("cdf is monotone with limits 0 and 1") {
    for (const auto& f : test_family()) {
        double prev = 0.0;
        for (double y = -30.0; y <= 30.0; y += 0.25) {
            const double c = f.cdf(y);
            CHECK(c >= prev - 1e-15);
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
            prev = c;
        }
        CHECK(f.cdf(-1e10) == doctest::Approx(0.0));
        CHECK(f.cdf(1e10) == doctest::Approx(1.0));
    }
}

TEST_CASE("quantile reference values") {
    CHECK(kStdNormal.quantile_set(0.5).lo == doctest::Approx(0.0).epsilon(1e-12));
    // -ln(0.75), from closed-form inversion written out here
    const double exp_oracle = -std::log(0.75);
    CHECK(exp_oracle == doctest::Approx(0.287682).epsilon(1e-5));
    const Interval q = kExp1.quantile_set(0.25);
    CHECK(q.lo == doctest::Approx(exp_oracle).epsilon(1e-12));
    CHECK(q.hi == doctest::Approx(exp_oracle).epsilon(1e-12));

    // flat CDF between the atoms of a fair two-point law
    const Interval flat =
        ScalarDistribution::discrete({{0.0, 0.5}, {1.0, 0.5}}).quantile_set(0.5);
    CHECK(flat.lo == doctest::Approx(0.0));
    CHECK(flat.hi == doctest::Approx(1.0));

    CHECK(kStdNormal.var_lower(0.05) ==
          doctest::Approx(-1.6448536269514722).epsilon(1e-12));
    CHECK(kTwoAtoms.var_lower(0.25) == doctest::Approx(-1.0));
    CHECK(kTwoAtoms.var_lower(0.5) == doctest::Approx(-1.0));
    CHECK(kTwoAtoms.var_lower(0.75) == doctest::Approx(1.0));
}

TEST_CASE("generalized inverse property on a grid of levels") {
    for (const auto& f : test_family()) {
        for (double u = 0.05; u < 1.0; u += 0.05) {
            const double q = f.quantile(u);
            CHECK(f.cdf(q) >= u - 1e-12);
            // nothing strictly below q reaches the level (checked just
            // below q, where the CDF is continuous there)
            if (f.atom_mass(q) == 0.0) CHECK(f.cdf(q - 1e-9) < u + 1e-9);
        }
    }
}

TEST_CASE("mixture quantile set finds flat stretches") {
    const ScalarDistribution gap = ScalarDistribution::mix(
        ScalarDistribution::uniform(0.0, 1.0), ScalarDistribution::uniform(2.0, 3.0), 0.5);
    const Interval q = gap.quantile_set(0.5);
    CHECK(q.lo == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(q.hi == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("moment reference values") {
    const ScalarDistribution mix =
        ScalarDistribution::mix(kStdNormal, ScalarDistribution::normal(2.0, 1.0), 0.5);
    CHECK(mix.mean() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mix.variance() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(kExp1.mean() == doctest::Approx(1.0));
    CHECK(kExp1.variance() == doctest::Approx(1.0));
    CHECK(kTwoAtoms.mean() == doctest::Approx(0.0));
    CHECK(kTwoAtoms.variance() == doctest::Approx(1.0));
    CHECK_THROWS_AS(ScalarDistribution::student_t(2.0).variance(), UnsupportedMomentError);
    CHECK_THROWS_AS(ScalarDistribution::student_t(1.0).mean(), UnsupportedMomentError);
    CHECK(ScalarDistribution::student_t(5.0, 1.0, 2.0).variance() ==
          doctest::Approx(4.0 * 5.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("mixture moment identities on a grid of weights") {
    const ScalarDistribution f = ScalarDistribution::normal(-1.0, 0.5);
    const ScalarDistribution g = kExp1;
    for (double lambda = 0.0; lambda <= 1.0; lambda += 0.125) {
        const ScalarDistribution m = ScalarDistribution::mix(f, g, lambda);
        const double want_mean = (1.0 - lambda) * f.mean() + lambda * g.mean();
        const double want_var = (1.0 - lambda) * f.variance() + lambda * g.variance() +
                                lambda * (1.0 - lambda) * (f.mean() - g.mean()) *
                                    (f.mean() - g.mean());
        CHECK(m.mean() == doctest::Approx(want_mean).epsilon(1e-10));
        CHECK(m.variance() == doctest::Approx(want_var).epsilon(1e-10));
    }
}

TEST_CASE("partial expectation reference values and quadrature oracle") {
    const double c = -1.644854;
    // oracle: integrate y * density directly
    const double by_quad = oracles::adaptive_simpson(
        [&](double y) { return y * oracles::normal_density(y, 0.0, 1.0); }, -40.0, c);
    CHECK(by_quad == doctest::Approx(-0.103136).epsilon(1e-4));
    CHECK(kStdNormal.partial_expectation(c) == doctest::Approx(by_quad).epsilon(1e-9));

    CHECK(kTwoAtoms.partial_expectation(-1.0) == doctest::Approx(-0.5));
    CHECK(kTwoAtoms.partial_expectation(std::numeric_limits<double>::infinity()) ==
          doctest::Approx(kTwoAtoms.mean()));
    for (const auto& f : test_family())
        CHECK(f.partial_expectation(std::numeric_limits<double>::infinity()) ==
              doctest::Approx(f.mean()).epsilon(1e-12));

    // student-t partial expectation against quadrature
    const ScalarDistribution t5 = ScalarDistribution::student_t(5.0);
    const double t_quad = oracles::adaptive_simpson(
        [&](double y) { return y * student_t_pdf(y, 5.0); }, -300.0, -0.7);
    CHECK(t5.partial_expectation(-0.7) == doctest::Approx(t_quad).epsilon(1e-7));
}

TEST_CASE("partial expectation at the lower quantile matches the tail integral") {
    for (const auto& f : test_family()) {
        for (double alpha : {0.1, 0.25, 0.5, 0.9}) {
            const double var = f.var_lower(alpha);
            // first tail term of the shortfall identity, times alpha
            const double es = f.es_lower(alpha);
            const double correction = var * (f.cdf(var) - alpha);
            CHECK(f.partial_expectation(var) ==
                  doctest::Approx(alpha * es + correction).epsilon(1e-8));
        }
    }
}

TEST_CASE("expected shortfall reference values") {
    // normal: -pdf(z)/alpha
    const double z = norm_quantile(0.05);
    const double closed = -norm_pdf(z) / 0.05;
    CHECK(closed == doctest::Approx(-2.062713).epsilon(1e-6));
    CHECK(kStdNormal.es_lower(0.05) == doctest::Approx(closed).epsilon(1e-8));

    CHECK(kTwoAtoms.es_lower(0.25) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ScalarDistribution::uniform(0.0, 1.0).es_lower(0.5) ==
          doctest::Approx(0.25).epsilon(1e-9));

    // both shortfall expressions agree for every family (the library
    // asserts this internally; a throw would fail the test)
    for (const auto& f : test_family())
        for (double alpha : {0.05, 0.25, 0.5, 0.75}) (void)f.es_lower(alpha);
}

TEST_CASE("mix degenerate weights and pointwise cdf combination") {
    const ScalarDistribution f = kStdNormal;
    const ScalarDistribution g = ScalarDistribution::normal(2.0, 1.0);
    const ScalarDistribution same = ScalarDistribution::mix(f, f, 0.3);
    const ScalarDistribution zero = ScalarDistribution::mix(f, g, 0.0);
    const ScalarDistribution half = ScalarDistribution::mix(f, g, 0.5);
    for (double y = -4.0; y <= 6.0; y += 0.5) {
        CHECK(zero.cdf(y) == doctest::Approx(f.cdf(y)).epsilon(1e-14));
        CHECK(same.cdf(y) == doctest::Approx(f.cdf(y)).epsilon(1e-14));
        CHECK(half.cdf(y) ==
              doctest::Approx(0.5 * f.cdf(y) + 0.5 * g.cdf(y)).epsilon(1e-14));
    }
    CHECK(half.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(ScalarDistribution::mix(f, g, 1.5), Error);
}

TEST_CASE("sampling: determinism, support, moments, ks bound") {
    const std::size_t n = 100000;
    for (const auto& f : test_family()) {
        const std::vector<double> a = f.sample(1000, 7);
        const std::vector<double> b = f.sample(1000, 7);
        CHECK(a == b);
        const std::vector<double> c = f.sample(1000, 8);
        CHECK(a != c);
    }

    const std::vector<double> big = kStdNormal.sample(n, 123);
    double mean = 0.0;
    for (double v : big) mean += v;
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean) < 0.02);

    for (double v : kTwoAtoms.sample(n, 5)) CHECK((v == -1.0 || v == 1.0));

    // two-sided KS bound 1.95/sqrt(n) * 1.5, seeded
    for (const auto& f : test_family()) {
        std::vector<double> u;
        u.reserve(n);
        for (double v : f.sample(n, 99)) u.push_back(f.cdf(v));
        // atoms make the plug-in KS statistic meaningless; restrict to
        // continuous laws
        if (!f.continuous()) continue;
        CHECK(ks_distance_uniform(u) < 1.95 / std::sqrt(static_cast<double>(n)) * 1.5);
    }
}

TEST_CASE("bivariate gaussian quadrant probabilities") {
    const BivariateDistribution ind =
        BivariateDistribution::gaussian({0.0, 0.0}, Matrix::identity(2));
    CHECK(ind.quadrant_prob(Quadrant::lower_lower, 0.0, 0.0) == doctest::Approx(0.25));
    CHECK(ind.quadrant_prob(Quadrant::lower_lower, 1.281552, 1.644854) ==
          doctest::Approx(0.855).epsilon(2e-6));

    Matrix cov = Matrix::from_rows({{1.0, 0.5}, {0.5, 1.0}});
    const BivariateDistribution corr = BivariateDistribution::gaussian({0.0, 0.0}, cov);
    // orthant closed form 1/4 + asin(rho)/(2 pi)
    const double orthant = 0.25 + std::asin(0.5) / (2.0 * M_PI);
    CHECK(orthant == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(corr.quadrant_prob(Quadrant::lower_lower, 0.0, 0.0) ==
          doctest::Approx(orthant).epsilon(1e-9));

    // Monte Carlo cross-check
    const auto mc = oracles::mc_mean2(
        corr, [](double y1, double y2) { return (y1 < 0.3 && y2 < -0.2) ? 1.0 : 0.0; },
        200000, 17);
    CHECK(std::abs(corr.quadrant_prob(Quadrant::lower_lower, 0.3, -0.2) - mc.mean) <
          3.0 * mc.se);

    // quadrants partition
    double total = 0.0;
    for (Quadrant q : {Quadrant::lower_lower, Quadrant::lower_upper, Quadrant::upper_lower,
                       Quadrant::upper_upper})
        total += corr.quadrant_prob(q, 0.7, -1.1);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bivariate joint cdf is monotone in each argument") {
    Matrix cov = Matrix::from_rows({{1.0, -0.4}, {-0.4, 2.0}});
    const BivariateDistribution f = BivariateDistribution::gaussian({0.5, -0.5}, cov);
    double prev = 0.0;
    for (double x = -4.0; x <= 4.0; x += 0.5) {
        const double c = f.joint_cdf(x, 1.0);
        CHECK(c >= prev - 1e-12);
        prev = c;
    }
    prev = 0.0;
    for (double y = -4.0; y <= 4.0; y += 0.5) {
        const double c = f.joint_cdf(0.3, y);
        CHECK(c >= prev - 1e-12);
        prev = c;
    }
    CHECK_THROWS_AS(
        BivariateDistribution::gaussian({0.0, 0.0},
                                        Matrix::from_rows({{1.0, 2.0}, {2.0, 1.0}})),
        Error);
}

TEST_CASE("bivariate discrete atoms use strict-lower weak-upper comparisons") {
    const BivariateDistribution f = BivariateDistribution::discrete(
        {{0.0, 0.0, 0.25}, {0.0, 1.0, 0.25}, {1.0, 0.0, 0.25}, {1.0, 1.0, 0.25}});
    // at x=(1,1): lower means strictly below 1
    CHECK(f.quadrant_prob(Quadrant::lower_lower, 1.0, 1.0) == doctest::Approx(0.25));
    CHECK(f.quadrant_prob(Quadrant::upper_upper, 1.0, 1.0) == doctest::Approx(0.25));
    CHECK(f.marginal_cdf(0, 0.0) == doctest::Approx(0.5));
    CHECK(f.marginal_lower(0, 0.0) == doctest::Approx(0.0));
    const auto pairs = f.sample(1000, 3);
    for (const auto& p : pairs) {
        CHECK((p[0] == 0.0 || p[0] == 1.0));
        CHECK((p[1] == 0.0 || p[1] == 1.0));
    }
}

TEST_CASE("bivariate sampling matches quadrant probabilities") {
    Matrix cov = Matrix::from_rows({{1.0, 0.5}, {0.5, 1.0}});
    const BivariateDistribution f = BivariateDistribution::gaussian({0.0, 0.0}, cov);
    const auto mc = oracles::mc_mean2(
        f, [](double y1, double y2) { return (y1 < 0.0 && y2 < 0.0) ? 1.0 : 0.0; }, 400000,
        21);
    CHECK(std::abs(mc.mean - 1.0 / 3.0) < 3.0 * mc.se);
}

TEST_CASE("discrete atom validation") {
    CHECK_THROWS_AS(ScalarDistribution::discrete({{0.0, 0.7}, {1.0, 0.2}}), Error);
    CHECK_THROWS_AS(ScalarDistribution::discrete({{0.0, -0.1}, {1.0, 1.1}}), Error);
    // duplicate atoms merge
    const ScalarDistribution d =
        ScalarDistribution::discrete({{1.0, 0.5}, {1.0, 0.25}, {2.0, 0.25}});
    CHECK(d.atom_mass(1.0) == doctest::Approx(0.75));
}
