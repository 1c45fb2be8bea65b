#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "idfunc/distribution.hpp"
#include "idfunc/identification.hpp"
#include "idfunc/osband.hpp"

namespace idfunc {

/// Paired forecasts and realisations, one row per period.
struct ForecastSeries {
    int action_dim = 1;
    int obs_dim = 1;
    std::vector<Vec> forecasts;
    std::vector<Vec> realisations;

    int n() const { return static_cast<int>(forecasts.size()); }
    void validate() const;
};

struct TestReport {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    double level = 0.05;
    bool reject = false;
    int n = 0;
    Vec moment_mean;
    double cov_condition = 0.0;
};

/// Wald test of mean-zero moments m_t = h(x_t) V(x_t, y_t): the
/// statistic n m̄' Σ̂⁻¹ m̄ is referred to a chi-square with
/// output_dim degrees of freedom. Σ̂ is the sample covariance of the
/// m_t, inverted through a symmetric eigendecomposition with an
/// eigenvalue floor of 1e-12 times the trace.
TestReport wald_calibration_test(const IdentificationFunction& v, const ForecastSeries& series,
                                 double level, const MatrixTransform* h = nullptr);

/// A data-generating description: per-period law and forecast,
/// cycled to the series length.
struct ScenarioPeriod {
    AnyDistribution law;
    Vec forecast;
};

struct Scenario {
    std::string name;
    std::vector<ScenarioPeriod> periods;
};

/// Forecast equals the functional of the generating law (null holds).
Scenario correct_forecast_scenario(const std::string& catalog_key, const AnyDistribution& law);
/// Forecast shifted by a constant bias vector (null fails).
Scenario biased_forecast_scenario(const std::string& catalog_key, const AnyDistribution& law,
                                  const Vec& bias);
/// Scale cycles through `sigmas` (centered normals); forecasts are the
/// per-period functional values shifted by bias_per_sigma * sigma_t.
/// Time-varying forecasts separate state-dependent transforms from
/// constant ones.
Scenario cycling_scale_scenario(const std::string& catalog_key, std::span<const double> sigmas,
                                const Vec& bias_per_sigma);

ForecastSeries simulate_series(const Scenario& scenario, int n, RandomStream& stream);

struct StudyRow {
    std::string h_key;
    double rejection_rate = 0.0;
    double se = 0.0;  // binomial standard error
};

struct StudyResult {
    std::vector<StudyRow> rows;
    std::vector<std::vector<double>> p_values;  // per transform, per replication
};

/// Monte Carlo size/power study: empirical rejection rate of the Wald
/// test per candidate transform. Per-replication streams are derived
/// from the master seed, so the table is reproducible and transforms
/// see identical data.
StudyResult size_power_study(const IdentificationFunction& v,
                             std::span<const TransformPtr> transforms, const Scenario& scenario,
                             int n, int replications, double level, std::uint64_t seed);

}  // namespace idfunc
