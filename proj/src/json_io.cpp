#include "idfunc/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace idfunc {

namespace {

std::string format_number(double x) {
    if (!std::isfinite(x)) throw Error("dump_json: non-finite number");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void dump_rec(const Json& j, std::ostringstream& os, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            // std::map ordering: keys already sorted
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad_in << Json(it.key()).dump() << ": ";
                dump_rec(it.value(), os, indent, depth + 1);
            }
            os << "\n" << pad << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            bool first = true;
            for (const auto& el : j) {
                if (!first) os << ",\n";
                first = false;
                os << pad_in;
                dump_rec(el, os, indent, depth + 1);
            }
            os << "\n" << pad << "]";
            return;
        }
        case Json::value_t::number_float:
            os << format_number(j.get<double>());
            return;
        default:
            os << j.dump();
            return;
    }
}

Json intervals_to_json(const std::vector<Interval>& box) {
    Json arr = Json::array();
    for (const Interval& iv : box) arr.push_back(Json::array({iv.lo, iv.hi}));
    return arr;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::ostringstream os;
    dump_rec(j, os, indent, 0);
    os << "\n";
    return os.str();
}

Json to_json(const ScalarDistribution& f) {
    using Family = ScalarDistribution::Family;
    Json j;
    switch (f.family()) {
        case Family::normal:
            j["family"] = "normal";
            j["params"] = f.params();
            break;
        case Family::exponential:
            j["family"] = "exponential";
            j["params"] = f.params();
            break;
        case Family::uniform:
            j["family"] = "uniform";
            j["params"] = f.params();
            break;
        case Family::student_t:
            j["family"] = "student-t";
            j["params"] = f.params();
            break;
        case Family::discrete_atoms: {
            j["family"] = "discrete-atoms";
            Json atoms = Json::array();
            for (const auto& [x, p] : f.atoms()) atoms.push_back(Json::array({x, p}));
            j["atoms"] = std::move(atoms);
            break;
        }
        case Family::mixture: {
            j["family"] = "mixture";
            Json comps = Json::array();
            for (const auto& c : f.components()) comps.push_back(to_json(*c));
            j["components"] = std::move(comps);
            j["weights"] = f.weights();
            break;
        }
    }
    return j;
}

Json to_json(const BivariateDistribution& f) {
    Json j;
    if (f.family() == BivariateDistribution::Family::gaussian) {
        j["family"] = "bivariate-gaussian";
        j["mean"] = f.mean();
        const Matrix& c = f.covariance();
        j["cov"] = Json::array({Json::array({c(0, 0), c(0, 1)}),
                                Json::array({c(1, 0), c(1, 1)})});
    } else {
        j["family"] = "discrete-atoms-2d";
        Json atoms = Json::array();
        for (const auto& a : f.atoms()) atoms.push_back(Json::array({a[0], a[1], a[2]}));
        j["atoms"] = std::move(atoms);
    }
    return j;
}

Json to_json(const AnyDistribution& f) {
    return std::visit([](const auto& d) { return to_json(d); }, f);
}

ScalarDistribution scalar_from_json(const Json& j) {
    const AnyDistribution d = distribution_from_json(j);
    return as_scalar(d);
}

AnyDistribution distribution_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw ParseError("distribution: expected an object with a 'family' field");
    const std::string family = j.at("family").get<std::string>();
    auto params = [&]() -> Vec {
        if (!j.contains("params")) throw ParseError("distribution: missing 'params'");
        return j.at("params").get<Vec>();
    };
    if (family == "normal") {
        const Vec p = params();
        if (p.size() != 2) throw ParseError("normal: params must be [mu, sigma]");
        return ScalarDistribution::normal(p[0], p[1]);
    }
    if (family == "exponential") {
        const Vec p = params();
        if (p.size() != 1) throw ParseError("exponential: params must be [rate]");
        return ScalarDistribution::exponential(p[0]);
    }
    if (family == "uniform") {
        const Vec p = params();
        if (p.size() != 2) throw ParseError("uniform: params must be [a, b]");
        return ScalarDistribution::uniform(p[0], p[1]);
    }
    if (family == "student-t") {
        const Vec p = params();
        if (p.size() == 1) return ScalarDistribution::student_t(p[0]);
        if (p.size() == 3) return ScalarDistribution::student_t(p[0], p[1], p[2]);
        throw ParseError("student-t: params must be [dof] or [dof, loc, scale]");
    }
    if (family == "discrete-atoms") {
        if (!j.contains("atoms")) throw ParseError("discrete-atoms: missing 'atoms'");
        std::vector<std::pair<double, double>> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        return ScalarDistribution::discrete(std::move(atoms));
    }
    if (family == "mixture") {
        if (!j.contains("components") || !j.contains("weights"))
            throw ParseError("mixture: needs 'components' and 'weights'");
        std::vector<ScalarDistribution> comps;
        for (const auto& c : j.at("components")) comps.push_back(scalar_from_json(c));
        return ScalarDistribution::mixture(std::move(comps), j.at("weights").get<Vec>());
    }
    if (family == "bivariate-gaussian") {
        if (!j.contains("mean") || !j.contains("cov"))
            throw ParseError("bivariate-gaussian: needs 'mean' and 'cov'");
        const Vec mean = j.at("mean").get<Vec>();
        const auto& cj = j.at("cov");
        Matrix cov(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                cov(r, c) = cj.at(static_cast<std::size_t>(r))
                                .at(static_cast<std::size_t>(c))
                                .get<double>();
        return BivariateDistribution::gaussian(mean, cov);
    }
    if (family == "discrete-atoms-2d") {
        if (!j.contains("atoms")) throw ParseError("discrete-atoms-2d: missing 'atoms'");
        std::vector<std::array<double, 3>> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>(),
                             a.at(2).get<double>()});
        return BivariateDistribution::discrete(std::move(atoms));
    }
    throw ParseError("distribution: unknown family '" + family + "'");
}

Json to_json(const ZEstimate& e) {
    Json j;
    j["estimate"] = e.point;
    Json intervals = Json::array();
    bool any_interval = false;
    for (std::size_t c = 0; c < e.root_intervals.size(); ++c) {
        if (e.kinds[c] == RootKind::interval) {
            intervals.push_back(Json::array({e.root_intervals[c].lo, e.root_intervals[c].hi}));
            any_interval = true;
        } else {
            intervals.push_back(nullptr);
        }
    }
    if (any_interval) j["interval"] = std::move(intervals);
    j["residual"] = e.residual;
    j["converged"] = e.converged;
    j["exact"] = e.exact;
    if (e.on_boundary) j["on_boundary"] = true;
    j["method"] = e.method;
    return j;
}

Json to_json(const TestReport& r) {
    Json j;
    j["statistic"] = r.statistic;
    j["df"] = r.df;
    j["p_value"] = r.p_value;
    j["level"] = r.level;
    j["reject"] = r.reject;
    j["n"] = r.n;
    j["moment_mean"] = r.moment_mean;
    j["cov_condition"] = r.cov_condition;
    return j;
}

Json to_json(const VerificationReport& r) {
    Json j;
    j["catalog_key"] = r.catalog_key;
    j["n_distributions"] = r.n_distributions;
    j["forward_checks"] = r.forward_checks;
    j["reverse_checks"] = r.reverse_checks;
    j["worst_zero_deviation"] = r.worst_zero_deviation;
    j["smallest_margin"] = r.smallest_margin;
    j["passed"] = r.passed();
    j["flagged"] = r.flagged_count();
    Json failures = Json::array();
    for (const auto& f : r.failures) {
        Json e;
        e["check"] = f.check;
        e["distribution"] = f.distribution;
        e["x"] = f.x;
        e["deviation"] = f.deviation;
        e["flagged"] = f.flagged;
        if (f.flagged) e["flag_reason"] = f.flag_reason;
        failures.push_back(std::move(e));
    }
    j["failures"] = std::move(failures);
    return j;
}

Json to_json(const LevelSetReport& r) {
    Json j;
    j["functional"] = r.functional_key;
    j["f"] = r.f_desc;
    j["g"] = r.g_desc;
    j["vacuous"] = r.vacuous;
    j["holds"] = r.holds;
    Json viols = Json::array();
    for (const auto& v : r.violations) {
        Json e;
        e["lambda"] = v.lambda;
        e["common"] = intervals_to_json(v.common);
        e["mixture_value"] = intervals_to_json(v.mixture_value);
        viols.push_back(std::move(e));
    }
    j["violations"] = std::move(viols);
    return j;
}

Json to_json(const EsWitness& w) {
    Json j;
    j["alpha"] = w.alpha;
    j["f"] = to_json(w.f);
    j["g"] = to_json(w.g);
    j["lambda"] = w.lambda;
    j["common_es"] = w.common_es;
    j["mixture_es"] = w.mixture_es;
    j["gap"] = std::abs(w.mixture_es - w.common_es);
    return j;
}

Json recovered_to_json(const RecoveredTransform& r, const Vec& x) {
    Json j;
    j["x"] = x;
    Json rows = Json::array();
    for (int i = 0; i < r.h.rows(); ++i) {
        Json row = Json::array();
        for (int c = 0; c < r.h.cols(); ++c) row.push_back(r.h(i, c));
        rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    j["determinant"] = r.det;
    j["heldout_residual"] = r.heldout_residual;
    j["battery_condition"] = r.battery_condition;
    return j;
}

}  // namespace idfunc
