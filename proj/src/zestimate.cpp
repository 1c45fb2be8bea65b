#include "idfunc/zestimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace idfunc {

namespace {

constexpr double kCountTol = 1e-9;

struct CatalogShape {
    enum class Kind {
        mean,
        expectile,
        quantile,
        mean_var,
        mean_var_prime,
        quantile_es,
        quantile_es_prime,
        var_covar,
        covar_1d,
        unknown,
    };
    Kind kind = Kind::unknown;
    double alpha = 0.0;
    double beta = 0.0;
};

CatalogShape classify(const std::string& key) {
    CatalogShape s;
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
                return s;
            }
            pos += used;
            if (pos < rest.size() && rest[pos] == ',') ++pos;
        }
    }
    using K = CatalogShape::Kind;
    if (name == "mean") s.kind = K::mean;
    else if (name == "expectile" && args.size() == 1) s.kind = K::expectile;
    else if (name == "quantile" && args.size() == 1) s.kind = K::quantile;
    else if (name == "mean-var") s.kind = K::mean_var;
    else if (name == "mean-var-prime") s.kind = K::mean_var_prime;
    else if (name == "quantile-es" && args.size() == 1) s.kind = K::quantile_es;
    else if (name == "quantile-es-prime" && args.size() == 1) s.kind = K::quantile_es_prime;
    else if (name == "var-covar" && args.size() == 2) s.kind = K::var_covar;
    else if (name == "covar-1d" && args.size() == 2) s.kind = K::covar_1d;
    if (!args.empty()) s.alpha = args[0];
    if (args.size() > 1) s.beta = args[1];
    return s;
}

struct IndicatorRoot {
    double point;
    Interval interval;
    RootKind kind;
    bool exact;
};

/// Root of count{values <= x}/n - level: an interval when n*level is an
/// attained count, otherwise the crossing order statistic.
IndicatorRoot lower_indicator_root(std::vector<double> values, double level) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    // distinct values with cumulative counts
    std::vector<double> distinct;
    std::vector<double> cum;
    for (double v : values) {
        if (distinct.empty() || distinct.back() != v) {
            distinct.push_back(v);
            cum.push_back(1.0);
        } else {
            cum.back() += 1.0;
        }
    }
    for (std::size_t i = 1; i < cum.size(); ++i) cum[i] += cum[i - 1];

    const double target = n * level;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
        if (std::abs(cum[i] - target) <= kCountTol * n) {
            if (i + 1 < distinct.size())
                return {distinct[i], {distinct[i], distinct[i + 1]}, RootKind::interval, true};
            // level attained only at the maximum: root ray [max, inf);
            // report the endpoint
            return {distinct[i], Interval::point(distinct[i]), RootKind::point, true};
        }
        if (cum[i] > target)
            return {distinct[i], Interval::point(distinct[i]), RootKind::crossing, false};
    }
    return {distinct.back(), Interval::point(distinct.back()), RootKind::crossing, false};
}

/// Root of count{values >= x}/n - level (decreasing, left-continuous in
/// x). An exact root region is (a, b] between adjacent distinct values;
/// its smallest attained root is b.
IndicatorRoot upper_indicator_root(std::vector<double> values, double level) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::vector<double> distinct;
    std::vector<double> above;  // count >= distinct[i]
    for (double v : values) {
        if (distinct.empty() || distinct.back() != v) distinct.push_back(v);
    }
    above.resize(distinct.size());
    {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            while (idx < values.size() && values[idx] < distinct[i]) ++idx;
            above[i] = n - static_cast<double>(idx);
        }
    }
    const double target = n * level;
    for (std::size_t i = distinct.size(); i-- > 0;) {
        if (std::abs(above[i] - target) <= kCountTol * n) {
            const double lo = i > 0 ? distinct[i - 1] : distinct[i];
            return {distinct[i], {lo, distinct[i]}, RootKind::interval, true};
        }
        if (above[i] > target) {
            const std::size_t j = std::min(i + 1, distinct.size() - 1);
            return {distinct[j], Interval::point(distinct[j]), RootKind::crossing, false};
        }
    }
    return {distinct.front(), Interval::point(distinct.front()), RootKind::crossing, false};
}

Vec column(const Sample& s, int j) {
    Vec out(static_cast<std::size_t>(s.n()));
    for (int i = 0; i < s.n(); ++i) out[static_cast<std::size_t>(i)] = s.row(i)[j];
    return out;
}

ZEstimate sequential_solve(const IdentificationFunction& v, const CatalogShape& shape,
                           const Sample& s, const ZOptions& opts) {
    using K = CatalogShape::Kind;
    const int n = s.n();
    ZEstimate est;
    est.method = "sequential";

    auto scalar_mean = [&](auto&& f) { return pairwise_mean(n, f); };

    switch (shape.kind) {
        case K::mean: {
            const double m = scalar_mean([&](std::size_t i) { return s.data[i]; });
            est.point = {m};
            est.kinds = {RootKind::point};
            est.root_intervals = {Interval::point(m)};
            break;
        }
        case K::expectile: {
            auto moment = [&](double x) {
                return scalar_mean(
                    [&](std::size_t i) { return v_expectile(shape.alpha, x, s.data[i]); });
            };
            double lo = *std::min_element(s.data.begin(), s.data.end());
            double hi = *std::max_element(s.data.begin(), s.data.end());
            if (lo == hi) {
                est.point = {lo};
            } else {
                for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    (moment(mid) < 0.0 ? lo : hi) = mid;
                }
                est.point = {0.5 * (lo + hi)};
            }
            est.kinds = {RootKind::point};
            est.root_intervals = {Interval::point(est.point[0])};
            break;
        }
        case K::quantile: {
            const IndicatorRoot r = lower_indicator_root(s.data, shape.alpha);
            est.point = {r.point};
            est.kinds = {r.kind};
            est.root_intervals = {r.interval};
            break;
        }
        case K::mean_var:
        case K::mean_var_prime: {
            const double m = scalar_mean([&](std::size_t i) { return s.data[i]; });
            const double var = scalar_mean([&](std::size_t i) {
                const double c = s.data[i] - m;
                return c * c;
            });
            est.point = {m, var};
            est.kinds = {RootKind::point, RootKind::point};
            est.root_intervals = {Interval::point(m), Interval::point(var)};
            est.on_boundary = var <= 0.0;
            break;
        }
        case K::quantile_es:
        case K::quantile_es_prime: {
            const IndicatorRoot r = lower_indicator_root(s.data, shape.alpha);
            const double x1 = r.point;
            const double tail = scalar_mean(
                [&](std::size_t i) { return s.data[i] <= x1 ? s.data[i] : 0.0; });
            const double hit = scalar_mean(
                [&](std::size_t i) { return s.data[i] <= x1 ? 1.0 : 0.0; });
            double x2 = tail / shape.alpha;
            if (shape.kind == K::quantile_es_prime)
                x2 -= x1 / shape.alpha * (hit - shape.alpha);
            est.point = {x1, x2};
            est.kinds = {r.kind, RootKind::point};
            est.root_intervals = {r.interval, Interval::point(x2)};
            break;
        }
        case K::var_covar: {
            const IndicatorRoot r1 = upper_indicator_root(column(s, 0), shape.beta);
            const double x1 = r1.point;
            std::vector<double> cond;
            for (int i = 0; i < n; ++i)
                if (s.row(i)[0] < x1) cond.push_back(s.row(i)[1]);
            if (cond.empty())
                throw EmptyRootError(
                    "var-covar: no observations below the first coordinate's root");
            const IndicatorRoot r2 = upper_indicator_root(cond, shape.alpha);
            est.point = {x1, r2.point};
            est.kinds = {r1.kind, r2.kind};
            est.root_intervals = {r1.interval, r2.interval};
            break;
        }
        case K::covar_1d:
            throw Error(
                "covar-1d: one-dimensional moment on a two-dimensional action domain has no "
                "unique root");
        case K::unknown:
        default:
            throw Error("sequential solver: unsupported moment function " + v.key());
    }

    est.residual = inf_norm(empirical_moment(v, est.point, s));
    est.exact = est.residual <= opts.tol;
    est.converged = true;
    return est;
}

// ---------------------------------------------------------------------------
// smoothed Newton fallback

Vec smoothed_moment(const IdentificationFunction& v, const Vec& x, const Sample& s,
                    double delta) {
    const int k = v.output_dim();
    Vec out(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        out[static_cast<std::size_t>(j)] = pairwise_mean(s.n(), [&](std::size_t i) {
            return v.evaluate_smoothed(x, s.row_vec(static_cast<int>(i)), delta)[j];
        });
    return out;
}

void project_into_domain(const ActionDomain& dom, Vec& x) {
    if (dom.kind() == ActionDomain::Kind::x2_nonneg && x[1] < 1e-12) x[1] = 1e-12;
    if (dom.kind() == ActionDomain::Kind::x1_ge_x2 && x[1] > x[0]) x[1] = x[0];
}

Vec default_start(const IdentificationFunction& v, const Sample& s) {
    Vec first = column(s, 0);
    std::nth_element(first.begin(), first.begin() + first.size() / 2, first.end());
    const double med = first[first.size() / 2];
    const int dim = v.domain().dim();
    if (dim == 1) return {med};
    Vec x(2, med);
    switch (v.domain().kind()) {
        case ActionDomain::Kind::x2_nonneg: {
            double var = 0.0;
            for (double y : first) var += (y - med) * (y - med);
            x[1] = var / static_cast<double>(first.size()) + 0.5;
            break;
        }
        case ActionDomain::Kind::x1_ge_x2:
            x[1] = med - 1.0;
            break;
        default:
            if (s.d == 2) {
                Vec second = column(s, 1);
                std::nth_element(second.begin(), second.begin() + second.size() / 2,
                                 second.end());
                x[1] = second[second.size() / 2];
            }
            break;
    }
    return x;
}

/// After the smoothed solve lands on (or inside) a root of the step
/// moment, find the plateau {t : component j vanishes with x_j = t} and
/// snap to its smallest attained root.
void snap_plateau_roots(const IdentificationFunction& v, const Sample& s, ZEstimate& est,
                        double tol) {
    const int k = static_cast<int>(est.point.size());
    if (v.output_dim() != k) return;  // snapping assumes a square triangular system

    double scale = 1.0;
    for (int i = 0; i < s.n(); ++i)
        for (int j = 0; j < s.d; ++j) scale = std::max(scale, std::abs(s.row(i)[j]));

    for (int j = 0; j < k; ++j) {
        Vec x = est.point;
        auto comp = [&](double t) {
            Vec xx = x;
            xx[static_cast<std::size_t>(j)] = t;
            return empirical_moment(v, xx, s)[static_cast<std::size_t>(j)];
        };
        const double here = est.point[static_cast<std::size_t>(j)];
        if (std::abs(comp(here)) > tol) continue;
        const double probe = std::max(1e-7 * scale, 1e-10);
        const bool flat_left = std::abs(comp(here - probe)) <= tol;
        const bool flat_right = std::abs(comp(here + probe)) <= tol;
        if (!flat_left && !flat_right) {
            est.kinds[static_cast<std::size_t>(j)] = RootKind::point;
            est.root_intervals[static_cast<std::size_t>(j)] = Interval::point(here);
            continue;
        }
        // walk out to the plateau edges by doubling, then bisect
        auto edge = [&](double direction) {
            double step = probe;
            double inside = here;
            int guard = 0;
            while (std::abs(comp(here + direction * step)) <= tol) {
                inside = here + direction * step;
                step *= 2.0;
                if (++guard > 200 || step > 4.0 * (scale + 1.0)) break;
            }
            double outside = here + direction * step;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (inside + outside);
                if (mid == inside || mid == outside) break;
                (std::abs(comp(mid)) <= tol ? inside : outside) = mid;
            }
            return inside;
        };
        const double lo = flat_left ? edge(-1.0) : here;
        const double hi = flat_right ? edge(1.0) : here;
        est.root_intervals[static_cast<std::size_t>(j)] = {lo, hi};
        est.kinds[static_cast<std::size_t>(j)] = RootKind::interval;
        // smallest attained root: the left edge when it is itself a
        // root (left-closed plateau), else the smallest root inside
        est.point[static_cast<std::size_t>(j)] = std::abs(comp(lo)) <= tol ? lo : hi;
    }
}

/// Unsmoothed one-dimensional refinement: bracket a sign change of the
/// j-th component in its own coordinate and bisect. Plateau (interval)
/// coordinates are left to the snapping step.
void polish_coordinates(const IdentificationFunction& v, const Sample& s, ZEstimate& est,
                        double tol) {
    const int k = static_cast<int>(est.point.size());
    for (int j = 0; j < k; ++j) {
        if (est.kinds[static_cast<std::size_t>(j)] == RootKind::interval) continue;
        auto comp = [&](double t) {
            Vec xx = est.point;
            xx[static_cast<std::size_t>(j)] = t;
            return empirical_moment(v, xx, s)[static_cast<std::size_t>(j)];
        };
        const double here = est.point[static_cast<std::size_t>(j)];
        const double g0 = comp(here);
        if (std::abs(g0) <= tol) continue;
        double h = std::max(1e-9 * (1.0 + std::abs(here)), 1e-12);
        double a = here, b = here;
        double ga = g0, gb = g0;
        bool bracketed = false;
        for (int it = 0; it < 80 && !bracketed; ++it) {
            a = here - h;
            b = here + h;
            ga = comp(a);
            gb = comp(b);
            if ((ga <= 0.0 && g0 >= 0.0) || (ga >= 0.0 && g0 <= 0.0)) {
                b = here;
                gb = g0;
                bracketed = ga != gb && (ga <= 0.0) != (gb <= 0.0);
            } else if ((gb <= 0.0 && g0 >= 0.0) || (gb >= 0.0 && g0 <= 0.0)) {
                a = here;
                ga = g0;
                bracketed = ga != gb && (ga <= 0.0) != (gb <= 0.0);
            }
            h *= 2.0;
        }
        if (!bracketed) continue;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            const double gm = comp(mid);
            if (gm == 0.0) {
                a = b = mid;
                break;
            }
            if ((gm <= 0.0) == (ga <= 0.0)) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
                gb = gm;
            }
        }
        const double root = std::abs(comp(a)) <= std::abs(comp(b)) ? a : b;
        est.point[static_cast<std::size_t>(j)] = root;
        est.root_intervals[static_cast<std::size_t>(j)] = Interval::point(root);
        est.kinds[static_cast<std::size_t>(j)] =
            std::abs(comp(root)) <= tol ? RootKind::point : RootKind::crossing;
    }
}

ZEstimate newton_solve(const IdentificationFunction& v, const Sample& s,
                       const ZOptions& opts) {
    const int k = v.output_dim();
    const int dim = v.domain().dim();
    if (k != dim)
        throw Error(v.key() + ": moment and action dimensions differ; no unique root");

    ZEstimate est;
    est.method = "smoothed-newton";

    double lo = s.data[0], hi = s.data[0];
    for (double y : s.data) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    const double range = std::max(hi - lo, 1e-6);
    double delta = range / std::sqrt(static_cast<double>(s.n()));

    Vec x = opts.initial.empty() ? default_start(v, s) : opts.initial;
    project_into_domain(v.domain(), x);

    for (int stage = 0; stage < 4; ++stage, delta *= 0.25) {
        for (int iter = 0; iter < 80; ++iter) {
            const Vec g = smoothed_moment(v, x, s, delta);
            if (inf_norm(g) <= 1e-13 * (1.0 + inf_norm(x))) break;
            // finite-difference Jacobian of the smoothed moment
            Matrix jac(k, k);
            const double step = std::max(delta / 8.0, 1e-7);
            for (int c = 0; c < k; ++c) {
                Vec xp = x, xm = x;
                xp[static_cast<std::size_t>(c)] += step;
                xm[static_cast<std::size_t>(c)] -= step;
                const Vec gp = smoothed_moment(v, xp, s, delta);
                const Vec gm = smoothed_moment(v, xm, s, delta);
                for (int r = 0; r < k; ++r)
                    jac(r, c) = (gp[static_cast<std::size_t>(r)] -
                                 gm[static_cast<std::size_t>(r)]) /
                                (2.0 * step);
            }
            Vec dir;
            try {
                dir = solve(jac, g);
            } catch (const SingularMatrixError&) {
                break;  // flat region; the plateau snap handles it
            }
            double lambda = 1.0;
            const double g0 = inf_norm(g);
            Vec trial = x;
            for (int back = 0; back < 30; ++back) {
                for (int c = 0; c < k; ++c)
                    trial[static_cast<std::size_t>(c)] =
                        x[static_cast<std::size_t>(c)] -
                        lambda * dir[static_cast<std::size_t>(c)];
                project_into_domain(v.domain(), trial);
                if (inf_norm(smoothed_moment(v, trial, s, delta)) <= (1.0 - 1e-4 * lambda) * g0)
                    break;
                lambda *= 0.5;
            }
            const Vec old = x;
            x = trial;
            double move = 0.0;
            for (int c = 0; c < k; ++c)
                move = std::max(move, std::abs(x[static_cast<std::size_t>(c)] -
                                               old[static_cast<std::size_t>(c)]));
            if (move <= 1e-14 * (1.0 + inf_norm(x))) break;
        }
    }

    est.point = x;
    est.kinds.assign(static_cast<std::size_t>(k), RootKind::point);
    est.root_intervals.clear();
    for (double c : x) est.root_intervals.push_back(Interval::point(c));
    const double snap_tol = std::max(opts.tol, 1e-12);
    snap_plateau_roots(v, s, est, snap_tol);
    polish_coordinates(v, s, est, snap_tol);
    est.residual = inf_norm(empirical_moment(v, est.point, s));
    est.exact = est.residual <= opts.tol;
    est.converged = est.exact || est.residual <= 1.0 / static_cast<double>(s.n()) + 1e-12;
    if (!est.converged)
        throw NonConvergedError(v.key() + ": smoothed solver residual " +
                                std::to_string(est.residual));
    return est;
}

}  // namespace

Sample Sample::scalars(Vec values) {
    Sample s;
    s.d = 1;
    s.data = std::move(values);
    s.validate();
    return s;
}

Sample Sample::pairs(const std::vector<std::array<double, 2>>& values) {
    Sample s;
    s.d = 2;
    s.data.reserve(values.size() * 2);
    for (const auto& p : values) {
        s.data.push_back(p[0]);
        s.data.push_back(p[1]);
    }
    s.validate();
    return s;
}

void Sample::validate() const {
    if (d < 1) throw Error("Sample: dimension must be >= 1");
    if (data.empty() || data.size() % static_cast<std::size_t>(d) != 0)
        throw Error("Sample: needs at least one complete observation");
    for (double x : data)
        if (!std::isfinite(x)) throw Error("Sample: non-finite entry");
}

Vec empirical_moment(const IdentificationFunction& v, const Vec& x, const Sample& s) {
    if (s.d != v.obs_dim())
        throw DimensionMismatchError("empirical_moment: sample dimension mismatch");
    const int k = v.output_dim();
    Vec out(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        out[static_cast<std::size_t>(j)] = pairwise_mean(s.n(), [&](std::size_t i) {
            return v.evaluate(x, s.row_vec(static_cast<int>(i)))[j];
        });
    return out;
}

ZEstimate z_estimate(const IdentificationFunction& v, const Sample& s, const ZOptions& opts) {
    s.validate();
    if (s.d != v.obs_dim())
        throw DimensionMismatchError("z_estimate: sample dimension mismatch");

    const CatalogShape shape = classify(v.key());
    const bool sequential_possible = shape.kind != CatalogShape::Kind::unknown;

    switch (opts.method) {
        case ZOptions::Method::sequential:
            return sequential_solve(v, shape, s, opts);
        case ZOptions::Method::smoothed_newton:
            return newton_solve(v, s, opts);
        case ZOptions::Method::automatic:
        default:
            if (sequential_possible) return sequential_solve(v, shape, s, opts);
            return newton_solve(v, s, opts);
    }
}

bool root_invariance_check(const IdentificationFunction& v, const MatrixTransform& h,
                           const Sample& s, double tol) {
    const IdFuncPtr base = IdFuncPtr(&v, [](const IdentificationFunction*) {});
    const TransformPtr ht = TransformPtr(&h, [](const MatrixTransform*) {});
    const IdFuncPtr transformed = apply_transform(ht, base);

    auto roots_of = [&](const IdentificationFunction& f) {
        std::vector<Vec> pts;
        const ZEstimate est = z_estimate(f, s);
        pts.push_back(est.point);
        for (std::size_t j = 0; j < est.root_intervals.size(); ++j) {
            if (est.kinds[j] != RootKind::interval) continue;
            Vec mid = est.point;
            mid[j] = est.root_intervals[j].midpoint();
            pts.push_back(mid);
        }
        // only exact roots participate in the invariance statement
        std::vector<Vec> exact;
        for (Vec& p : pts)
            if (inf_norm(empirical_moment(f, p, s)) <= tol) exact.push_back(std::move(p));
        return exact;
    };

    for (const Vec& p : roots_of(v))
        if (inf_norm(empirical_moment(*transformed, p, s)) > tol) return false;
    for (const Vec& p : roots_of(*transformed))
        if (inf_norm(empirical_moment(v, p, s)) > tol) return false;
    return true;
}

}  // namespace idfunc
