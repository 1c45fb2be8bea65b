#include "idfunc/batteries.hpp"

#include <algorithm>
#include <cmath>

#include "idfunc/osband.hpp"

namespace idfunc {

namespace {

bool quantile_type(const std::string& name) {
    return name.rfind("quantile", 0) == 0;  // quantile, quantile-es, quantile-es-prime
}

bool needs_variance(const std::string& name) {
    return name.rfind("mean-var", 0) == 0;
}

std::vector<AnyDistribution> bivariate_gaussian_grid() {
    std::vector<AnyDistribution> out;
    const double rhos[] = {-0.6, -0.3, 0.0, 0.25, 0.5};
    const double mus[] = {-1.0, 0.0, 1.0};
    const double sigmas[] = {0.8, 1.5};
    for (double rho : rhos)
        for (double mu : mus)
            for (double s : sigmas) {
                Matrix cov = Matrix::from_rows(
                    {{s * s, rho * s * 1.0}, {rho * s * 1.0, 1.0}});
                out.emplace_back(BivariateDistribution::gaussian({mu, -0.5 * mu}, cov));
                if (out.size() >= 24) return out;
            }
    return out;
}

}  // namespace

std::vector<AnyDistribution> supported_battery(const std::string& catalog_key, int minimum) {
    const std::string name = catalog_key.substr(0, catalog_key.find(':'));
    if (name == "var-covar" || name == "covar-1d") return bivariate_gaussian_grid();

    std::vector<AnyDistribution> out;
    const double mus[] = {-2.0, -0.5, 0.0, 1.0, 3.0};
    const double sigmas[] = {0.5, 1.0, 2.5};
    for (double mu : mus)
        for (double s : sigmas) out.emplace_back(ScalarDistribution::normal(mu, s));
    out.emplace_back(ScalarDistribution::exponential(1.0));
    out.emplace_back(ScalarDistribution::exponential(0.4));
    out.emplace_back(ScalarDistribution::uniform(-1.0, 2.0));
    out.emplace_back(ScalarDistribution::uniform(0.0, 1.0));
    out.emplace_back(ScalarDistribution::mix(ScalarDistribution::normal(-1.0, 0.7),
                                             ScalarDistribution::normal(2.0, 1.2), 0.35));
    out.emplace_back(ScalarDistribution::mix(ScalarDistribution::normal(0.0, 1.0),
                                             ScalarDistribution::exponential(0.8), 0.5));
    if (!quantile_type(name) && !needs_variance(name))
        out.emplace_back(ScalarDistribution::student_t(5.0, 0.5, 1.0));
    if (needs_variance(name))
        out.emplace_back(ScalarDistribution::student_t(7.0, 0.0, 1.0));
    if (quantile_type(name))
        out.emplace_back(ScalarDistribution::student_t(5.0, 0.0, 2.0));

    while (static_cast<int>(out.size()) < minimum)
        out.emplace_back(ScalarDistribution::normal(0.1 * static_cast<double>(out.size()), 1.3));
    return out;
}

std::vector<AnyDistribution> stress_battery(const std::string& catalog_key) {
    std::vector<AnyDistribution> out = supported_battery(catalog_key);
    const std::string name = catalog_key.substr(0, catalog_key.find(':'));
    if (name == "quantile" || quantile_type(name)) {
        // atom carrying the CDF past the level, and a flat stretch at it
        out.emplace_back(ScalarDistribution::discrete({{-1.0, 0.5}, {1.0, 0.5}}));
        out.emplace_back(ScalarDistribution::discrete({{0.0, 0.25}, {1.0, 0.25}, {2.0, 0.5}}));
    }
    return out;
}

std::vector<AnyDistribution> v1_battery(const IdentificationFunction& v, const Vec& x) {
    const int k = v.output_dim();
    if (v.obs_dim() != 1)
        throw Error("v1_battery: only scalar-observation moment functions are supported");

    // candidate pool: normals centered around x1 with a spread of scales
    std::vector<ScalarDistribution> pool;
    const double center = x[0];
    const double shifts[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
    const double scales[] = {0.5, 1.0, 2.0};
    for (double s : scales)
        for (double d : shifts) pool.push_back(ScalarDistribution::normal(center + d, s));

    // deterministic search over all (k+1)-subsets in lexicographic order
    std::vector<std::size_t> comb(static_cast<std::size_t>(k) + 1);
    for (std::size_t i = 0; i < comb.size(); ++i) comb[i] = i;
    const std::size_t n = pool.size();
    auto advance = [&]() -> bool {
        int i = static_cast<int>(comb.size()) - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] ==
                             n - comb.size() + static_cast<std::size_t>(i))
            --i;
        if (i < 0) return false;
        ++comb[static_cast<std::size_t>(i)];
        for (std::size_t j = static_cast<std::size_t>(i) + 1; j < comb.size(); ++j)
            comb[j] = comb[j - 1] + 1;
        return true;
    };
    do {
        std::vector<AnyDistribution> battery;
        for (std::size_t i : comb) battery.emplace_back(pool[i]);
        try {
            const SimplexCheck chk = check_v1(v, x, battery);
            if (chk.origin_interior) return battery;
        } catch (const DegenerateSimplexError&) {
        } catch (const UnsupportedMomentError&) {
        }
    } while (advance());
    throw Error("v1_battery: no passing battery found at x for " + v.key());
}

std::vector<Vec> default_x_grid(const IdentificationFunction& v, const FunctionalSpec& t,
                                const AnyDistribution& f) {
    const std::vector<Interval> target = t.value(f);
    const int k = v.domain().dim();
    const double offsets[] = {-2.0, -0.75, -0.25, -0.12, 0.0, 0.12, 0.25, 0.75, 2.0};

    std::vector<Vec> grid;
    if (k == 1) {
        for (double o : offsets)
            grid.push_back({o <= 0.0 ? target[0].lo + o : target[0].hi + o});
        return grid;
    }
    for (double o1 : offsets)
        for (double o2 : offsets) {
            Vec x(2);
            x[0] = o1 <= 0.0 ? target[0].lo + o1 : target[0].hi + o1;
            x[1] = o2 <= 0.0 ? target[1].lo + o2 : target[1].hi + o2;
            if (!v.domain().contains(x)) continue;
            grid.push_back(std::move(x));
        }
    // a moment function of lower output dimension has spurious zeroes
    // off the target; the coordinate swap is the documented one
    if (v.output_dim() < v.domain().dim())
        grid.push_back({target[1].lo, target[0].lo});
    return grid;
}

}  // namespace idfunc
