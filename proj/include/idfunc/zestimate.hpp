#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "idfunc/identification.hpp"
#include "idfunc/osband.hpp"

namespace idfunc {

/// Observations, one row per draw, d columns.
struct Sample {
    int d = 1;
    std::vector<double> data;  // row-major

    int n() const { return d > 0 ? static_cast<int>(data.size()) / d : 0; }
    std::span<const double> row(int i) const {
        return {data.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
    }
    Vec row_vec(int i) const {
        const auto r = row(i);
        return Vec(r.begin(), r.end());
    }

    static Sample scalars(Vec values);
    static Sample pairs(const std::vector<std::array<double, 2>>& values);
    void validate() const;  // n >= 1, all entries finite
};

/// The empirical root can no longer exist in the domain (no sign change
/// of the averaged moment function).
class EmptyRootError : public Error {
public:
    using Error::Error;
};

enum class RootKind {
    point,     // isolated exact root
    interval,  // the moment vanishes on a whole interval
    crossing,  // sign change without an exact zero (indicator steps)
};

struct ZEstimate {
    Vec point;
    std::vector<Interval> root_intervals;  // degenerate unless kind == interval
    std::vector<RootKind> kinds;
    double residual = 0.0;  // ||averaged moment at point||_inf
    bool converged = false;
    bool exact = false;        // residual <= tolerance
    bool on_boundary = false;  // e.g. zero dispersion from a degenerate sample
    std::string method;
};

struct ZOptions {
    enum class Method { automatic, sequential, smoothed_newton };
    Method method = Method::automatic;
    double tol = 1e-9;
    Vec initial;  // optional start for the smoothed solver
};

Vec empirical_moment(const IdentificationFunction& v, const Vec& x, const Sample& s);

/// Solve (1/n) sum_i V(x, y_i) = 0. Catalog systems are triangular and
/// solved coordinate by coordinate (order statistics for indicator
/// moments, bisection for monotone ones); anything else runs damped
/// Newton on a smoothed moment with the smoothing width driven to zero,
/// validated against the unsmoothed moment. Interval roots report their
/// smallest root.
ZEstimate z_estimate(const IdentificationFunction& v, const Sample& s, const ZOptions& opts = {});

/// Exact roots of the averaged moment are invariant under full-rank
/// transforms: every reported root of V is one of h(x)V and conversely.
bool root_invariance_check(const IdentificationFunction& v, const MatrixTransform& h,
                           const Sample& s, double tol = 1e-12);

}  // namespace idfunc
