#include "idfunc/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "idfunc/functional.hpp"
#include "idfunc/special.hpp"

namespace idfunc {

void ForecastSeries::validate() const {
    if (forecasts.size() != realisations.size())
        throw Error("ForecastSeries: forecasts and realisations differ in length");
    if (forecasts.empty()) throw InsufficientDataError("ForecastSeries: empty series");
    for (const Vec& x : forecasts) {
        if (static_cast<int>(x.size()) != action_dim)
            throw DimensionMismatchError("ForecastSeries: forecast dimension mismatch");
        for (double c : x)
            if (!std::isfinite(c)) throw Error("ForecastSeries: non-finite forecast");
    }
    for (const Vec& y : realisations) {
        if (static_cast<int>(y.size()) != obs_dim)
            throw DimensionMismatchError("ForecastSeries: realisation dimension mismatch");
        for (double c : y)
            if (!std::isfinite(c)) throw Error("ForecastSeries: non-finite realisation");
    }
}

TestReport wald_calibration_test(const IdentificationFunction& v, const ForecastSeries& series,
                                 double level, const MatrixTransform* h) {
    series.validate();
    if (!(level > 0.0 && level < 1.0)) throw Error("wald test: level must lie in (0,1)");
    if (series.action_dim != v.domain().dim() || series.obs_dim != v.obs_dim())
        throw DimensionMismatchError("wald test: series does not match the moment function");
    const int k = v.output_dim();
    const int n = series.n();
    if (n <= k)
        throw InsufficientDataError("wald test: need more periods than moment dimensions");
    if (h && h->dim() != k)
        throw DimensionMismatchError("wald test: transform dimension mismatch");

    std::vector<Vec> moments(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const Vec& x = series.forecasts[static_cast<std::size_t>(t)];
        Vec m = v.evaluate(x, series.realisations[static_cast<std::size_t>(t)]);
        if (h) m = h->eval(x) * m;
        moments[static_cast<std::size_t>(t)] = std::move(m);
    }

    Vec mean(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        mean[static_cast<std::size_t>(j)] = pairwise_mean(
            static_cast<std::size_t>(n),
            [&](std::size_t t) { return moments[t][static_cast<std::size_t>(j)]; });

    Matrix cov(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) {
            const double c = pairwise_mean(static_cast<std::size_t>(n), [&](std::size_t t) {
                return (moments[t][static_cast<std::size_t>(a)] -
                        mean[static_cast<std::size_t>(a)]) *
                       (moments[t][static_cast<std::size_t>(b)] -
                        mean[static_cast<std::size_t>(b)]);
            });
            cov(a, b) = c;
            cov(b, a) = c;
        }

    const SymmetricEigen eig = eigen_symmetric(cov);
    double trace = 0.0;
    for (int j = 0; j < k; ++j) trace += cov(j, j);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double lambda : eig.values) {
        lo = std::min(lo, lambda);
        hi = std::max(hi, lambda);
    }
    if (!(lo > 0.0) || hi / lo > 1e10)
        throw SingularCovarianceError("wald test: moment covariance is numerically singular");

    const double floor_value = 1e-12 * std::max(trace, 1e-300);
    // statistic = n * mean' V diag(1/lambda) V' mean
    double stat = 0.0;
    for (int j = 0; j < k; ++j) {
        double proj = 0.0;
        for (int i = 0; i < k; ++i)
            proj += eig.vectors(i, j) * mean[static_cast<std::size_t>(i)];
        stat += proj * proj / std::max(eig.values[static_cast<std::size_t>(j)], floor_value);
    }
    stat *= static_cast<double>(n);

    TestReport report;
    report.statistic = stat;
    report.df = k;
    report.p_value = chi_square_sf(stat, static_cast<double>(k));
    report.level = level;
    report.reject = report.p_value < level;
    report.n = n;
    report.moment_mean = mean;
    report.cov_condition = hi / lo;
    return report;
}

namespace {

Vec draw_observation(const AnyDistribution& law, RandomStream& stream) {
    if (std::holds_alternative<ScalarDistribution>(law))
        return {std::get<ScalarDistribution>(law).draw(stream)};
    const auto pair = std::get<BivariateDistribution>(law).draw(stream);
    return {pair[0], pair[1]};
}

}  // namespace

Scenario correct_forecast_scenario(const std::string& catalog_key, const AnyDistribution& law) {
    Scenario sc;
    sc.name = "correct:" + catalog_key;
    sc.periods.push_back({law, functional_for(catalog_key).point_value(law)});
    return sc;
}

Scenario biased_forecast_scenario(const std::string& catalog_key, const AnyDistribution& law,
                                  const Vec& bias) {
    Scenario sc;
    sc.name = "biased:" + catalog_key;
    Vec forecast = functional_for(catalog_key).point_value(law);
    if (bias.size() != forecast.size())
        throw DimensionMismatchError("biased_forecast_scenario: bias dimension mismatch");
    for (std::size_t j = 0; j < forecast.size(); ++j) forecast[j] += bias[j];
    sc.periods.push_back({law, std::move(forecast)});
    return sc;
}

Scenario cycling_scale_scenario(const std::string& catalog_key, std::span<const double> sigmas,
                                const Vec& bias_per_sigma) {
    if (sigmas.empty()) throw Error("cycling_scale_scenario: need at least one scale");
    Scenario sc;
    sc.name = "cycling-scale:" + catalog_key;
    const FunctionalSpec t = functional_for(catalog_key);
    for (double s : sigmas) {
        AnyDistribution law{ScalarDistribution::normal(0.0, s)};
        Vec forecast = t.point_value(law);
        if (bias_per_sigma.size() != forecast.size())
            throw DimensionMismatchError("cycling_scale_scenario: bias dimension mismatch");
        for (std::size_t j = 0; j < forecast.size(); ++j) forecast[j] += bias_per_sigma[j] * s;
        sc.periods.push_back({std::move(law), std::move(forecast)});
    }
    return sc;
}

ForecastSeries simulate_series(const Scenario& scenario, int n, RandomStream& stream) {
    if (scenario.periods.empty()) throw Error("simulate_series: empty scenario");
    ForecastSeries series;
    series.action_dim = static_cast<int>(scenario.periods.front().forecast.size());
    series.obs_dim = obs_dim(scenario.periods.front().law);
    series.forecasts.reserve(static_cast<std::size_t>(n));
    series.realisations.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const ScenarioPeriod& p =
            scenario.periods[static_cast<std::size_t>(t) % scenario.periods.size()];
        series.forecasts.push_back(p.forecast);
        series.realisations.push_back(draw_observation(p.law, stream));
    }
    return series;
}

StudyResult size_power_study(const IdentificationFunction& v,
                             std::span<const TransformPtr> transforms, const Scenario& scenario,
                             int n, int replications, double level, std::uint64_t seed) {
    if (replications < 1) throw Error("size_power_study: need at least one replication");
    StudyResult result;
    result.rows.resize(transforms.size());
    result.p_values.assign(transforms.size(), {});
    for (auto& pv : result.p_values) pv.reserve(static_cast<std::size_t>(replications));
    std::vector<int> rejects(transforms.size(), 0);

    for (int rep = 0; rep < replications; ++rep) {
        RandomStream stream =
            RandomStream::derive(seed, static_cast<std::uint64_t>(rep));
        const ForecastSeries series = simulate_series(scenario, n, stream);
        for (std::size_t hj = 0; hj < transforms.size(); ++hj) {
            const TestReport report =
                wald_calibration_test(v, series, level, transforms[hj].get());
            rejects[hj] += report.reject ? 1 : 0;
            result.p_values[hj].push_back(report.p_value);
        }
    }

    for (std::size_t hj = 0; hj < transforms.size(); ++hj) {
        const double rate = static_cast<double>(rejects[hj]) / replications;
        result.rows[hj].h_key = transforms[hj]->key();
        result.rows[hj].rejection_rate = rate;
        result.rows[hj].se = std::sqrt(std::max(rate * (1.0 - rate), 0.0) /
                                       static_cast<double>(replications));
    }
    return result;
}

}  // namespace idfunc
