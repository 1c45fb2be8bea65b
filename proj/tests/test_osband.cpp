#include <doctest.h>

#include <cmath>

#include "idfunc/batteries.hpp"
#include "idfunc/osband.hpp"
#include "idfunc/rng.hpp"

using namespace idfunc;

namespace {

std::vector<Vec> grid_2d(double x1_lo, double x1_hi, double x2_lo, double x2_hi, int steps) {
    std::vector<Vec> grid;
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j) {
            const double x1 = x1_lo + (x1_hi - x1_lo) * i / (steps - 1);
            const double x2 = x2_lo + (x2_hi - x2_lo) * j / (steps - 1);
            grid.push_back({x1, x2});
        }
    return grid;
}

std::vector<Vec> scalar_grid(double lo, double hi, int steps) {
    std::vector<Vec> grid;
    for (int i = 0; i < steps; ++i) grid.push_back({lo + (hi - lo) * i / (steps - 1)});
    return grid;
}

}  // namespace

TEST_CASE("full-rank checks on the built-in transforms") {
    const TransformPtr shear = make_mean_var_shear();
    for (const Vec& x : grid_2d(-3.0, 3.0, 0.1, 4.0, 5)) {
        const RankCheck rc = is_full_rank(*shear, x);
        CHECK(rc.full_rank);
        CHECK(rc.det == doctest::Approx(1.0));
    }
    const TransformPtr qshear = make_quantile_es_shear(0.1);
    for (const Vec& x : grid_2d(-3.0, 3.0, -5.0, -0.1, 5)) {
        const RankCheck rc = is_full_rank(*qshear, x);
        CHECK(rc.full_rank);
        CHECK(rc.det == doctest::Approx(1.0));
    }
    const RankCheck singular =
        is_full_rank(*make_constant_transform(Matrix::from_rows({{1.0, 2.0}, {2.0, 4.0}})),
                     {0.0, 0.0});
    CHECK(!singular.full_rank);
    CHECK(singular.det == doctest::Approx(0.0));
    const RankCheck rot = is_full_rank(
        *make_constant_transform(Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}})), {0.0, 0.0});
    CHECK(rot.full_rank);
    CHECK(rot.det == doctest::Approx(1.0));
}

TEST_CASE("applying a transform matches the closed-form alternatives pointwise") {
    const IdFuncPtr mv = make_mean_var();
    const IdFuncPtr mvp = make_mean_var(true);
    const IdFuncPtr sheared = apply_transform(make_mean_var_shear(), mv);

    const IdFuncPtr qes = make_quantile_es(0.25);
    const IdFuncPtr qesp = make_quantile_es(0.25, true);
    const IdFuncPtr qsheared = apply_transform(make_quantile_es_shear(0.25), qes);

    RandomStream stream(77);
    for (int i = 0; i < 2000; ++i) {
        const Vec x{4.0 * (stream.uniform01() - 0.5), 4.0 * stream.uniform01()};
        const Vec xq{x[0], x[0] - 4.0 * stream.uniform01()};
        const Vec y{6.0 * (stream.uniform01() - 0.5)};
        for (int j = 0; j < 2; ++j) {
            CHECK(sheared->evaluate(x, y)[j] ==
                  doctest::Approx(mvp->evaluate(x, y)[j]).epsilon(1e-14));
            CHECK(qsheared->evaluate(xq, y)[j] ==
                  doctest::Approx(qesp->evaluate(xq, y)[j]).epsilon(1e-14));
        }
    }

    // identity leaves the function untouched
    const IdFuncPtr same = apply_transform(make_identity_transform(2), mv);
    const Vec x{0.5, 1.5};
    const Vec y{0.3};
    CHECK(same->evaluate(x, y) == mv->evaluate(x, y));

    // expected values transform identically
    const AnyDistribution f{ScalarDistribution::normal(0.3, 1.1)};
    const Vec lhs = sheared->expected(x, f);
    const Vec rhs = mvp->expected(x, f);
    CHECK(lhs[0] == doctest::Approx(rhs[0]).epsilon(1e-12));
    CHECK(lhs[1] == doctest::Approx(rhs[1]).epsilon(1e-12));

    CHECK_THROWS_AS(apply_transform(make_identity_transform(1), mv),
                    DimensionMismatchError);
}

TEST_CASE("pointwise grid check vanishes for the catalog pairs") {
    const auto y_grid = scalar_grid(-5.0, 5.0, 21);
    const auto x_grid_mv = grid_2d(-2.0, 2.0, 0.25, 4.0, 5);
    CHECK(pointwise_osband_check(*make_mean_var(), *make_mean_var(true),
                                 *make_mean_var_shear(), x_grid_mv, y_grid) <= 1e-12);

    std::vector<Vec> x_grid_qes;
    for (const Vec& x : grid_2d(-2.0, 2.0, 0.5, 3.0, 5))
        x_grid_qes.push_back({x[0], x[0] - x[1]});
    CHECK(pointwise_osband_check(*make_quantile_es(0.1), *make_quantile_es(0.1, true),
                                 *make_quantile_es_shear(0.1), x_grid_qes, y_grid) <= 1e-12);

    CHECK(pointwise_osband_check(*make_mean_var(), *make_mean_var(),
                                 *make_identity_transform(2), x_grid_mv, y_grid) == 0.0);

    // off-grid random points, same identity
    RandomStream stream(5);
    std::vector<Vec> x_rand, y_rand;
    for (int i = 0; i < 200; ++i) {
        x_rand.push_back({3.0 * (stream.uniform01() - 0.5), 3.0 * stream.uniform01() + 0.01});
        y_rand.push_back({8.0 * (stream.uniform01() - 0.5)});
    }
    CHECK(pointwise_osband_check(*make_mean_var(), *make_mean_var(true),
                                 *make_mean_var_shear(), x_rand, y_rand) <= 1e-12);
}

TEST_CASE("recover_h reproduces the hand-solved 2x2 system") {
    const IdFuncPtr mv = make_mean_var();
    const IdFuncPtr mvp = make_mean_var(true);
    const Vec x{2.0, 3.0};
    const std::vector<AnyDistribution> battery{
        AnyDistribution{ScalarDistribution::normal(0.0, 1.0)},
        AnyDistribution{ScalarDistribution::normal(1.0, std::sqrt(2.0))},
        AnyDistribution{ScalarDistribution::normal(0.5, 1.0)},
    };
    // solve columns: (2,-2) and (1,0)
    CHECK(expected_v(*mv, x, battery[0])[0] == doctest::Approx(2.0));
    CHECK(expected_v(*mv, x, battery[0])[1] == doctest::Approx(-2.0));
    CHECK(expected_v(*mv, x, battery[1])[0] == doctest::Approx(1.0));
    CHECK(expected_v(*mv, x, battery[1])[1] == doctest::Approx(0.0));

    const RecoveredTransform r = recover_h(*mv, *mvp, x, battery);
    CHECK(r.h(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.h(0, 1) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(r.h(1, 0) == doctest::Approx(4.0).epsilon(1e-10));  // 2 * x1
    CHECK(r.h(1, 1) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.det == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.heldout_residual <= 1e-10);

    // self-recovery gives the identity
    const RecoveredTransform self = recover_h(*mv, *mv, x, battery);
    CHECK(self.h(0, 0) == doctest::Approx(1.0));
    CHECK(self.h(0, 1) == doctest::Approx(0.0));
    CHECK(self.h(1, 0) == doctest::Approx(0.0));
    CHECK(self.h(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("recover_h rejects a pair that is not linked by any matrix") {
    // the median moment is not a scalar multiple of the mean moment
    // across a scale family
    const IdFuncPtr mean_fn = make_mean();
    const IdFuncPtr med = make_quantile(0.5);
    const std::vector<AnyDistribution> battery{
        AnyDistribution{ScalarDistribution::normal(1.0, 1.0)},
        AnyDistribution{ScalarDistribution::normal(2.0, 1.0)},
    };
    CHECK_THROWS_AS(recover_h(*mean_fn, *med, {0.0}, battery), InconsistentPairError);
}

TEST_CASE("recover_h flags singular batteries") {
    const IdFuncPtr mv = make_mean_var();
    // two laws with identical moment vectors at x
    const std::vector<AnyDistribution> battery{
        AnyDistribution{ScalarDistribution::normal(0.0, 1.0)},
        AnyDistribution{ScalarDistribution::normal(0.0, 1.0)},
        AnyDistribution{ScalarDistribution::normal(1.0, 1.0)},
    };
    CHECK_THROWS_AS(recover_h(*mv, *make_mean_var(true), {1.0, 2.0}, battery),
                    SingularBatteryError);
}

TEST_CASE("round trip: apply a transform, then recover it on a grid") {
    struct PairCase {
        IdFuncPtr v;
        TransformPtr h;
    };
    const std::vector<PairCase> cases = {
        {make_mean_var(), make_mean_var_shear()},
        {make_quantile_es(0.2), make_quantile_es_shear(0.2)},
        {make_mean_var(), make_constant_transform(Matrix::from_rows({{2.0, 1.0}, {0.0, 1.0}}))},
    };
    for (const PairCase& c : cases) {
        const IdFuncPtr transformed = apply_transform(c.h, c.v);
        std::vector<Vec> grid;
        if (c.v->domain().kind() == ActionDomain::Kind::x2_nonneg)
            grid = grid_2d(-1.5, 1.5, 0.5, 3.0, 3);
        else
            for (const Vec& g : grid_2d(-1.5, 1.5, 0.5, 2.0, 3)) grid.push_back({g[0], g[0] - g[1]});
        for (const Vec& x : grid) {
            const std::vector<AnyDistribution> battery = v1_battery(*c.v, x);
            const RecoveredTransform r = recover_h(*c.v, *transformed, x, battery);
            const Matrix want = c.h->eval(x);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    CHECK(r.h(i, j) == doctest::Approx(want(i, j)).epsilon(1e-8));
            CHECK(r.heldout_residual <= 1e-6);
        }
    }
}

TEST_CASE("composition of transforms equals the transform of the product") {
    const IdFuncPtr mv = make_mean_var();
    const TransformPtr h1 = make_mean_var_shear();
    const TransformPtr h2 = make_constant_transform(Matrix::from_rows({{1.0, 1.0}, {0.0, 2.0}}));
    const IdFuncPtr nested = apply_transform(h2, apply_transform(h1, mv));
    const IdFuncPtr product = apply_transform(make_product_transform(h2, h1), mv);
    RandomStream stream(13);
    for (int i = 0; i < 500; ++i) {
        const Vec x{2.0 * (stream.uniform01() - 0.5), 2.0 * stream.uniform01() + 0.1};
        const Vec y{4.0 * (stream.uniform01() - 0.5)};
        const Vec a = nested->evaluate(x, y);
        const Vec b = product->evaluate(x, y);
        CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-14));
        CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-14));
    }
}

TEST_CASE("check_v1 on the three hand-built batteries") {
    const IdFuncPtr mean_fn = make_mean();
    // straddle: moment values -1 and +1, weights one half each
    {
        const std::vector<AnyDistribution> battery{
            AnyDistribution{ScalarDistribution::normal(1.0, 1.0)},
            AnyDistribution{ScalarDistribution::normal(-1.0, 1.0)},
        };
        const SimplexCheck chk = check_v1(*mean_fn, {0.0}, battery);
        CHECK(chk.origin_interior);
        CHECK(chk.barycentric[0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(chk.barycentric[1] == doctest::Approx(0.5).epsilon(1e-9));
    }
    // same side: origin outside the hull
    {
        const std::vector<AnyDistribution> battery{
            AnyDistribution{ScalarDistribution::normal(1.0, 1.0)},
            AnyDistribution{ScalarDistribution::normal(2.0, 1.0)},
        };
        const SimplexCheck chk = check_v1(*mean_fn, {0.0}, battery);
        CHECK(!chk.origin_interior);
    }
    // two-dimensional: fails with a wide third law, passes after
    // swapping it for a tight one
    {
        const IdFuncPtr mv = make_mean_var();
        const Vec x{0.0, 1.0};
        const std::vector<AnyDistribution> wide{
            AnyDistribution{ScalarDistribution::normal(1.0, 1.0)},
            AnyDistribution{ScalarDistribution::normal(-1.0, 1.0)},
            AnyDistribution{ScalarDistribution::normal(0.0, std::sqrt(3.0))},
        };
        CHECK(!check_v1(*mv, x, wide).origin_interior);

        const std::vector<AnyDistribution> tight{
            AnyDistribution{ScalarDistribution::normal(1.0, 1.0)},
            AnyDistribution{ScalarDistribution::normal(-1.0, 1.0)},
            AnyDistribution{ScalarDistribution::normal(0.0, 0.5)},
        };
        const SimplexCheck chk = check_v1(*mv, x, tight);
        CHECK(chk.origin_interior);
        // hand-solved barycentric coordinates (3/14, 3/14, 4/7)
        CHECK(chk.barycentric[0] == doctest::Approx(3.0 / 14.0).epsilon(1e-9));
        CHECK(chk.barycentric[1] == doctest::Approx(3.0 / 14.0).epsilon(1e-9));
        CHECK(chk.barycentric[2] == doctest::Approx(4.0 / 7.0).epsilon(1e-9));
    }
}

TEST_CASE("check_v1 is invariant under battery relabeling") {
    const IdFuncPtr mv = make_mean_var();
    const Vec x{0.5, 1.5};
    std::vector<AnyDistribution> battery{
        AnyDistribution{ScalarDistribution::normal(1.5, 1.0)},
        AnyDistribution{ScalarDistribution::normal(-0.5, 1.0)},
        AnyDistribution{ScalarDistribution::normal(0.5, 0.6)},
    };
    const SimplexCheck base = check_v1(*mv, x, battery);
    std::vector<AnyDistribution> perm{battery[2], battery[0], battery[1]};
    const SimplexCheck rotated = check_v1(*mv, x, perm);
    CHECK(base.origin_interior == rotated.origin_interior);
    CHECK(base.barycentric[0] == doctest::Approx(rotated.barycentric[1]).epsilon(1e-12));
    CHECK(base.barycentric[1] == doctest::Approx(rotated.barycentric[2]).epsilon(1e-12));
    CHECK(base.barycentric[2] == doctest::Approx(rotated.barycentric[0]).epsilon(1e-12));
}

TEST_CASE("check_v1 rejects degenerate simplices and wrong battery sizes") {
    const IdFuncPtr mean_fn = make_mean();
    const std::vector<AnyDistribution> degenerate{
        AnyDistribution{ScalarDistribution::normal(1.0, 1.0)},
        AnyDistribution{ScalarDistribution::normal(1.0, 2.0)},  // same mean: same moment
    };
    CHECK_THROWS_AS(check_v1(*mean_fn, {1.0}, degenerate), DegenerateSimplexError);
    const std::vector<AnyDistribution> too_many{
        AnyDistribution{ScalarDistribution::normal(0.0, 1.0)},
        AnyDistribution{ScalarDistribution::normal(1.0, 1.0)},
        AnyDistribution{ScalarDistribution::normal(2.0, 1.0)},
    };
    CHECK_THROWS_AS(check_v1(*mean_fn, {0.5}, too_many), Error);
}

TEST_CASE("strictness is preserved under full-rank transforms on a grid") {
    const IdFuncPtr mv = make_mean_var();
    const IdFuncPtr sheared = apply_transform(make_mean_var_shear(), mv);
    const AnyDistribution f{ScalarDistribution::normal(0.5, 1.2)};
    for (const Vec& x : grid_2d(-1.5, 2.5, 0.2, 3.0, 7)) {
        const double base = inf_norm(expected_v(*mv, x, f));
        const double trans = inf_norm(expected_v(*sheared, x, f));
        CHECK((base <= 1e-10) == (trans <= 1e-10));
    }
}

TEST_CASE("recovered determinant keeps one sign across a connected grid") {
    const IdFuncPtr qes = make_quantile_es(0.2);
    const IdFuncPtr qesp = make_quantile_es(0.2, true);
    double min_det = 1e300, max_det = -1e300;
    for (double x1 = -2.0; x1 <= 2.0; x1 += 0.5) {
        const Vec x{x1, x1 - 1.0};
        const std::vector<AnyDistribution> battery = v1_battery(*qes, x);
        const RecoveredTransform r = recover_h(*qes, *qesp, x, battery);
        min_det = std::min(min_det, r.det);
        max_det = std::max(max_det, r.det);
    }
    CHECK(min_det > 0.0);  // all on the same side of zero
    CHECK(max_det > 0.0);
}

TEST_CASE("tabulated transforms interpolate and refuse extrapolation") {
    std::vector<double> nodes{0.0, 1.0, 2.0};
    std::vector<Matrix> mats{Matrix::identity(2),
                             Matrix::from_rows({{1.0, 0.0}, {2.0, 1.0}}),
                             Matrix::from_rows({{1.0, 0.0}, {4.0, 1.0}})};
    const TransformPtr tab = make_tabulated_transform(0, nodes, mats);
    const Matrix mid = tab->eval({0.5, 0.0});
    CHECK(mid(1, 0) == doctest::Approx(1.0));
    CHECK(mid(0, 0) == doctest::Approx(1.0));
    const Matrix at_node = tab->eval({2.0, 0.0});
    CHECK(at_node(1, 0) == doctest::Approx(4.0));
    CHECK_THROWS_AS(tab->eval({2.5, 0.0}), DomainError);
    CHECK_THROWS_AS(tab->eval({-0.1, 0.0}), DomainError);

    // a tabulation of the recovered shear reproduces it between nodes
    const IdFuncPtr mv = make_mean_var();
    const IdFuncPtr mvp = make_mean_var(true);
    std::vector<double> xs{-1.0, 0.0, 1.0, 2.0};
    std::vector<Matrix> recovered;
    for (double x1 : xs) {
        const Vec x{x1, 1.0};
        recovered.push_back(recover_h(*mv, *mvp, x, v1_battery(*mv, x)).h);
    }
    const TransformPtr interp = make_tabulated_transform(0, xs, recovered);
    // the true link is linear in x1, so interpolation is exact
    const Matrix probe = interp->eval({0.5, 1.0});
    CHECK(probe(1, 0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("transform keys parse") {
    CHECK(make_transform("identity", 2)->key() == "identity");
    CHECK(make_transform("mean-var-shear", 2)->key() == "mean-var-shear");
    CHECK(make_transform("quantile-es-shear:0.1", 2)->dim() == 2);
    CHECK(make_transform("scaled-identity:3", 2)->eval({0.0, 0.0})(0, 0) ==
          doctest::Approx(3.0));
    const TransformPtr c = make_transform("constant:[[1,2],[3,4]]", 2);
    CHECK(c->eval({0.0, 0.0})(1, 0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(make_transform("bogus", 2), ParseError);
}
