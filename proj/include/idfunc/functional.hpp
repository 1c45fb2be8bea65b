#pragma once

#include <string>
#include <vector>

#include "idfunc/distribution.hpp"
#include "idfunc/identification.hpp"

namespace idfunc {

/// A possibly set-valued functional T mapping distributions into the
/// action domain. Values are per-coordinate closed intervals; point
/// values are degenerate intervals. The lower endpoint is the reported
/// representative (lower-quantile convention).
class FunctionalSpec {
public:
    enum class Tag {
        mean,
        expectile,
        quantile,
        mean_variance,
        quantile_es,
        var_covar,
        // single coordinates, used by the level-sets diagnostics
        variance,
        es,
    };

    static FunctionalSpec mean();
    static FunctionalSpec expectile(double tau);
    static FunctionalSpec quantile(double alpha);
    static FunctionalSpec mean_variance();
    static FunctionalSpec quantile_es(double alpha);
    static FunctionalSpec var_covar(double alpha, double beta);
    static FunctionalSpec variance_only();
    static FunctionalSpec es_only(double alpha);

    Tag tag() const { return tag_; }
    int dim() const;
    std::string key() const;

    std::vector<Interval> value(const AnyDistribution& f) const;
    /// Lower endpoints of value().
    Vec point_value(const AnyDistribution& f) const;

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

private:
    FunctionalSpec(Tag tag, double alpha, double beta) : tag_(tag), alpha_(alpha), beta_(beta) {}
    Tag tag_;
    double alpha_ = 0.0;
    double beta_ = 0.0;
};

std::vector<Interval> functional_value(const FunctionalSpec& t, const AnyDistribution& f);

/// The functional identified by a catalog moment function.
FunctionalSpec functional_for(const std::string& catalog_key);

}  // namespace idfunc
