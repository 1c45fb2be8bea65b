#include "idfunc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "idfunc/base.hpp"

namespace idfunc {

namespace {

// 15-point Kronrod nodes on [-1,1] and weights; the odd-indexed nodes
// form the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct GkResult {
    double integral;
    double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double kron = 0.0;
    for (int i = 0; i < 7; ++i) kron += kWgk[i] * (fv[i] + fv[14 - i]);
    kron += kWgk[7] * fv[7];
    double gauss = kWg[3] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    kron *= h;
    gauss *= h;
    return {kron, std::abs(kron - gauss)};
}

struct Segment {
    double a, b;
    double integral;
    double error;
    int depth;
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts, std::span<const double> split_points) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::vector<double> cuts{a, b};
    for (double s : split_points)
        if (s > a && s < b) cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Segment> stack;
    stack.reserve(64);
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const GkResult r = gk15(f, cuts[i], cuts[i + 1]);
        stack.push_back({cuts[i], cuts[i + 1], r.integral, r.error, 0});
        total += r.integral;
    }

    const double span_len = b - a;
    while (!stack.empty()) {
        Segment seg = stack.back();
        stack.pop_back();
        const double local_tol =
            std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) * (seg.b - seg.a) / span_len;
        const double mid = 0.5 * (seg.a + seg.b);
        if (seg.error <= local_tol || seg.depth >= opts.max_depth || mid <= seg.a ||
            mid >= seg.b) {
            total_err += seg.error;
            continue;
        }
        const GkResult left = gk15(f, seg.a, mid);
        const GkResult right = gk15(f, mid, seg.b);
        total += left.integral + right.integral - seg.integral;
        stack.push_back({seg.a, mid, left.integral, left.error, seg.depth + 1});
        stack.push_back({mid, seg.b, right.integral, right.error, seg.depth + 1});
    }

    if (!std::isfinite(total)) throw Error("integrate: non-finite integral");
    (void)total_err;
    return sign * total;
}

}  // namespace idfunc
