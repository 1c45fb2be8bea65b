#pragma once

#include <functional>
#include <span>

namespace idfunc {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 60;
};

/// Adaptive Gauss-Kronrod (7,15) integration of f over [a, b].
///
/// `split_points` lists interior abscissae where f is known to jump or
/// kink (indicator breakpoints, atom locations); the interval is cut
/// there before any subdivision. Nodes are strictly interior, so
/// integrable endpoint singularities are tolerated.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {},
                 std::span<const double> split_points = {});

}  // namespace idfunc
