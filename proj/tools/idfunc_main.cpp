// Command-line front end: Z-estimation, calibration backtests,
// identification verification, transform recovery and size/power
// studies, all with reproducible seeds and machine-readable output.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "idfunc/batteries.hpp"
#include "idfunc/calibration.hpp"
#include "idfunc/csv.hpp"
#include "idfunc/functional.hpp"
#include "idfunc/json_io.hpp"
#include "idfunc/verifier.hpp"
#include "idfunc/zestimate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitSingularCovariance = 4;
constexpr int kExitSingularBattery = 5;

using idfunc::Json;

void emit(const Json& j, const std::string& output_path) {
    const std::string text = idfunc::dump_json(j);
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw idfunc::Error("cannot write '" + output_path + "'");
    out << text;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw idfunc::ParseError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw idfunc::ParseError(std::string("bad JSON in '") + path + "': " + e.what());
    }
    return j;
}

idfunc::Sample sample_from_csv(const std::string& path, int obs_dim) {
    const idfunc::CsvTable table = idfunc::read_csv(path);
    if (table.cols() != obs_dim)
        throw idfunc::ParseError("expected " + std::to_string(obs_dim) +
                                 " observation column(s), found " +
                                 std::to_string(table.cols()));
    idfunc::Sample s;
    s.d = obs_dim;
    for (const idfunc::Vec& row : table.rows)
        for (double v : row) s.data.push_back(v);
    s.validate();
    return s;
}

idfunc::ForecastSeries series_from_csv(const std::string& path, int action_dim, int obs_dim) {
    const idfunc::CsvTable table = idfunc::read_csv(path);
    if (table.cols() != action_dim + obs_dim)
        throw idfunc::ParseError("expected " + std::to_string(action_dim + obs_dim) +
                                 " columns (x then y), found " + std::to_string(table.cols()));
    idfunc::ForecastSeries series;
    series.action_dim = action_dim;
    series.obs_dim = obs_dim;
    for (const idfunc::Vec& row : table.rows) {
        series.forecasts.emplace_back(row.begin(), row.begin() + action_dim);
        series.realisations.emplace_back(row.begin() + action_dim, row.end());
    }
    series.validate();
    return series;
}

std::vector<idfunc::AnyDistribution> battery_from_file(const std::string& path) {
    const Json j = read_json_file(path);
    if (!j.is_array()) throw idfunc::ParseError("battery file must hold a JSON array");
    std::vector<idfunc::AnyDistribution> out;
    for (const auto& el : j) out.push_back(idfunc::distribution_from_json(el));
    return out;
}

std::vector<idfunc::Vec> grid_from_json(const Json& j) {
    std::vector<idfunc::Vec> grid;
    for (const auto& p : j) {
        if (p.is_array())
            grid.push_back(p.get<idfunc::Vec>());
        else
            grid.push_back({p.get<double>()});
    }
    return grid;
}

std::vector<idfunc::Vec> default_recover_grid(const std::string& v_key) {
    std::vector<idfunc::Vec> grid;
    const std::string name = v_key.substr(0, v_key.find(':'));
    if (name == "mean-var" || name == "mean-var-prime") {
        for (double x1 : {-2.0, -1.0, 0.0, 1.0, 2.0})
            for (double x2 : {0.5, 1.0, 2.0, 3.0, 4.0}) grid.push_back({x1, x2});
    } else {
        for (double x1 : {-2.0, -1.0, 0.0, 1.0, 2.0})
            for (double gap : {0.5, 1.0, 1.5, 2.0, 2.5}) grid.push_back({x1, x1 - gap});
    }
    return grid;
}

int run_estimate(const std::string& key, const std::string& input, std::uint64_t seed,
                 double tol, const std::string& output) {
    const idfunc::IdFuncPtr v = idfunc::make_catalog(key);
    const idfunc::Sample sample = sample_from_csv(input, v->obs_dim());
    idfunc::ZOptions opts;
    if (tol > 0.0) opts.tol = tol;
    const idfunc::ZEstimate est = idfunc::z_estimate(*v, sample, opts);
    Json j = idfunc::to_json(est);
    j["functional"] = v->key();
    j["n"] = sample.n();
    j["seed"] = seed;
    emit(j, output);
    return est.converged ? kExitOk : kExitNotConverged;
}

int run_backtest(const std::string& key, const std::string& input,
                 const std::string& transform_key, double level, std::uint64_t seed,
                 const std::string& output) {
    const idfunc::IdFuncPtr v = idfunc::make_catalog(key);
    const idfunc::ForecastSeries series =
        series_from_csv(input, v->domain().dim(), v->obs_dim());
    idfunc::TransformPtr h;
    if (!transform_key.empty()) h = idfunc::make_transform(transform_key, v->output_dim());
    const idfunc::TestReport report =
        idfunc::wald_calibration_test(*v, series, level, h.get());
    Json j = idfunc::to_json(report);
    j["functional"] = v->key();
    if (h) j["transform"] = h->key();
    j["seed"] = seed;
    emit(j, output);
    return kExitOk;
}

int run_verify(const std::string& key, const std::string& battery_path, double tol,
               std::uint64_t seed, const std::string& output) {
    const idfunc::IdFuncPtr v = idfunc::make_catalog(key);
    const idfunc::FunctionalSpec t = idfunc::functional_for(key);
    const std::vector<idfunc::AnyDistribution> family =
        battery_path.empty() ? idfunc::stress_battery(key) : battery_from_file(battery_path);

    idfunc::VerifyOptions opts;
    if (tol > 0.0) opts.zero_tol = tol;

    idfunc::VerificationReport merged;
    merged.catalog_key = v->key();
    merged.smallest_margin = std::numeric_limits<double>::infinity();
    for (const idfunc::AnyDistribution& f : family) {
        std::vector<idfunc::Vec> grid;
        try {
            grid = idfunc::default_x_grid(*v, t, f);
        } catch (const idfunc::UnsupportedMomentError&) {
            continue;
        }
        const std::span<const idfunc::AnyDistribution> one{&f, 1};
        const idfunc::VerificationReport r =
            idfunc::verify_identification(*v, t, one, grid, opts);
        merged.n_distributions += r.n_distributions;
        merged.forward_checks += r.forward_checks;
        merged.reverse_checks += r.reverse_checks;
        merged.worst_zero_deviation =
            std::max(merged.worst_zero_deviation, r.worst_zero_deviation);
        if (r.reverse_checks > 0)
            merged.smallest_margin = std::min(merged.smallest_margin, r.smallest_margin);
        for (const auto& fail : r.failures) merged.failures.push_back(fail);
    }
    if (!std::isfinite(merged.smallest_margin)) merged.smallest_margin = 0.0;

    Json j = idfunc::to_json(merged);
    j["seed"] = seed;
    emit(j, output);
    return merged.passed() ? kExitOk : 1;
}

int run_recover_h(const std::string& v_key, const std::string& vprime_key,
                  const std::string& battery_path, const std::string& grid_json, double tol,
                  const std::string& output, const std::string& csv_path) {
    const idfunc::IdFuncPtr v = idfunc::make_catalog(v_key);
    const idfunc::IdFuncPtr vp = idfunc::make_catalog(vprime_key);
    const double residual_tol = tol > 0.0 ? tol : 1e-6;

    std::vector<idfunc::Vec> grid;
    if (!grid_json.empty()) {
        grid = grid_from_json(Json::parse(grid_json));
    } else {
        grid = default_recover_grid(v->key());
    }

    std::optional<std::vector<idfunc::AnyDistribution>> fixed_battery;
    if (!battery_path.empty()) fixed_battery = battery_from_file(battery_path);

    Json rows = Json::array();
    idfunc::CsvTable csv;
    const int dim = v->domain().dim();
    for (int c = 0; c < dim; ++c) csv.header.push_back("x" + std::to_string(c + 1));
    csv.header.push_back("det");
    csv.header.push_back("residual");

    bool all_ok = true;
    for (const idfunc::Vec& x : grid) {
        const std::vector<idfunc::AnyDistribution> battery =
            fixed_battery ? *fixed_battery : idfunc::v1_battery(*v, x);
        Json row;
        idfunc::Vec csv_row(x);
        try {
            const idfunc::RecoveredTransform r =
                idfunc::recover_h(*v, *vp, x, battery, residual_tol);
            row = idfunc::recovered_to_json(r, x);
            csv_row.push_back(r.det);
            csv_row.push_back(r.heldout_residual);
        } catch (const idfunc::InconsistentPairError& e) {
            all_ok = false;
            row["x"] = x;
            row["error"] = "inconsistent-pair";
            row["heldout_residual"] = e.heldout_residual;
            csv_row.push_back(0.0);
            csv_row.push_back(e.heldout_residual);
        }
        rows.push_back(std::move(row));
        csv.rows.push_back(std::move(csv_row));
    }

    if (!csv_path.empty()) idfunc::write_csv(csv_path, csv);
    emit(rows, output);
    return all_ok ? kExitOk : kExitNotConverged;
}

int run_power_study(const std::string& config_path, const std::string& output) {
    const Json cfg = read_json_file(config_path);
    const std::string key = cfg.at("functional").get<std::string>();
    const idfunc::IdFuncPtr v = idfunc::make_catalog(key);

    std::vector<idfunc::TransformPtr> transforms;
    for (const auto& tk : cfg.at("transforms"))
        transforms.push_back(idfunc::make_transform(tk.get<std::string>(), v->output_dim()));

    const Json& sc = cfg.at("scenario");
    const std::string type = sc.at("type").get<std::string>();
    idfunc::Scenario scenario;
    if (type == "correct") {
        scenario = idfunc::correct_forecast_scenario(
            key, idfunc::distribution_from_json(sc.at("law")));
    } else if (type == "biased") {
        scenario = idfunc::biased_forecast_scenario(
            key, idfunc::distribution_from_json(sc.at("law")),
            sc.at("bias").get<idfunc::Vec>());
    } else if (type == "cycling-scale") {
        const std::vector<double> sigmas = sc.at("sigmas").get<std::vector<double>>();
        scenario = idfunc::cycling_scale_scenario(key, sigmas,
                                                  sc.at("bias_per_sigma").get<idfunc::Vec>());
    } else {
        throw idfunc::ParseError("scenario type must be correct|biased|cycling-scale");
    }

    const int n = cfg.at("n").get<int>();
    const int reps = cfg.at("replications").get<int>();
    const double level = cfg.value("level", 0.05);
    const std::uint64_t seed = cfg.value("seed", 0ULL);

    const idfunc::StudyResult result =
        idfunc::size_power_study(*v, transforms, scenario, n, reps, level, seed);

    idfunc::CsvTable table;
    table.header = {"rejection_rate", "se"};
    // h_key is text; emit it as the row label column via a separate file
    // layout: h_key,rejection_rate,se
    std::ostringstream os;
    os << "h_key,rejection_rate,se\n";
    char buf[40];
    for (const idfunc::StudyRow& row : result.rows) {
        os << row.h_key << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", row.rejection_rate);
        os << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", row.se);
        os << buf << "\n";
    }
    if (output.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw idfunc::Error("cannot write '" + output + "'");
        out << os.str();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"identification-function toolkit"};
    app.require_subcommand(1);

    std::string functional, input, output, transform_key, battery_path, grid_json, csv_path;
    std::string vprime_key, config_path;
    std::uint64_t seed = 0;
    double tol = 0.0;
    double level = 0.05;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--tol", tol, "tolerance override");
        cmd->add_option("--output", output, "output path (default: stdout)");
    };

    CLI::App* estimate = app.add_subcommand("estimate", "solve empirical moment conditions");
    estimate->add_option("--functional", functional, "catalog key")->required();
    estimate->add_option("--input", input, "CSV with one observation per row")->required();
    add_common(estimate);

    CLI::App* backtest = app.add_subcommand("backtest", "Wald calibration test on a series");
    backtest->add_option("--functional", functional, "catalog key")->required();
    backtest->add_option("--input", input, "CSV with x then y columns")->required();
    backtest->add_option("--transform", transform_key, "transform key (default identity)");
    backtest->add_option("--level", level, "nominal test level");
    add_common(backtest);

    CLI::App* verify = app.add_subcommand("verify", "verify identification on a family");
    verify->add_option("--functional", functional, "catalog key")->required();
    verify->add_option("--battery", battery_path, "JSON array of distributions");
    add_common(verify);

    CLI::App* recover = app.add_subcommand("recover-h", "recover the linking matrix function");
    recover->add_option("--v", functional, "catalog key of the base moment function")
        ->required();
    recover->add_option("--vprime", vprime_key, "catalog key of the transformed one")
        ->required();
    recover->add_option("--battery", battery_path, "JSON array of distributions");
    recover->add_option("--grid", grid_json, "JSON list of action points");
    recover->add_option("--csv", csv_path, "also write a CSV sweep (x..., det, residual)");
    add_common(recover);

    CLI::App* study = app.add_subcommand("power-study", "Monte Carlo size/power table");
    study->add_option("--config", config_path, "study configuration JSON")->required();
    add_common(study);

    CLI11_PARSE(app, argc, argv);

    try {
        if (estimate->parsed()) return run_estimate(functional, input, seed, tol, output);
        if (backtest->parsed())
            return run_backtest(functional, input, transform_key, level, seed, output);
        if (verify->parsed()) return run_verify(functional, battery_path, tol, seed, output);
        if (recover->parsed())
            return run_recover_h(functional, vprime_key, battery_path, grid_json, tol, output,
                                 csv_path);
        if (study->parsed()) return run_power_study(config_path, output);
    } catch (const idfunc::ParseError& e) {
        std::cerr << "error: " << e.what();
        if (e.line) std::cerr << " (line " << e.line << ")";
        std::cerr << "\n";
        return kExitParse;
    } catch (const idfunc::SingularBatteryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSingularBattery;
    } catch (const idfunc::SingularCovarianceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSingularCovariance;
    } catch (const idfunc::InsufficientDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSingularCovariance;
    } catch (const idfunc::EmptyRootError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const idfunc::NonConvergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const idfunc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
