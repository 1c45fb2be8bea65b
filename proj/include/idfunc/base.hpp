#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace idfunc {

using Vec = std::vector<double>;

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A requested moment does not exist for the distribution (e.g. the
/// variance of a heavy-tailed law).
class UnsupportedMomentError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// Point outside the admissible action domain, or an interpolated
/// transform asked to extrapolate.
class DomainError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// The battery of distributions used for a transform recovery produced
/// linearly dependent moment vectors.
class SingularBatteryError : public Error {
public:
    using Error::Error;
};

/// A recovered transform failed the held-out consistency certificate:
/// the two moment functions do not identify the same functional on the
/// supplied class.
class InconsistentPairError : public Error {
public:
    InconsistentPairError(const std::string& msg, double residual)
        : Error(msg), heldout_residual(residual) {}
    double heldout_residual;
};

class DegenerateSimplexError : public Error {
public:
    using Error::Error;
};

class SingularCovarianceError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class NonConvergedError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line_number = 0)
        : Error(msg), line(line_number) {}
    std::size_t line;
};

/// Closed interval [lo, hi]. Degenerate intervals (lo == hi) stand for
/// point values.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {}
    static Interval point(double v) { return {v, v}; }

    double width() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool is_point(double tol = 0.0) const { return width() <= tol; }
    bool contains(double x, double tol = 0.0) const {
        return x >= lo - tol && x <= hi + tol;
    }
    /// Distance from x to the interval; zero inside.
    double distance(double x) const {
        if (x < lo) return lo - x;
        if (x > hi) return x - hi;
        return 0.0;
    }
};

/// Sup-norm distance from x to a product of per-coordinate intervals.
double box_distance(const Vec& x, std::span<const Interval> box);

double inf_norm(const Vec& v);

namespace detail {
template <class F>
double pairwise_sum_impl(std::size_t lo, std::size_t hi, F&& f) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum_impl(lo, mid, f) + pairwise_sum_impl(mid, hi, f);
}
}  // namespace detail

/// Deterministic tree reduction of f(0) + ... + f(n-1). The fixed
/// association order makes concurrent and sequential sweeps agree bit
/// for bit.
template <class F>
double pairwise_sum(std::size_t n, F&& f) {
    if (n == 0) return 0.0;
    return detail::pairwise_sum_impl(0, n, f);
}

template <class F>
double pairwise_mean(std::size_t n, F&& f) {
    if (n == 0) throw Error("pairwise_mean: empty range");
    return pairwise_sum(n, f) / static_cast<double>(n);
}

}  // namespace idfunc
