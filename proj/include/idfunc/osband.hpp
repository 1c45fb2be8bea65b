#pragma once

#include <memory>
#include <span>
#include <string>

#include "idfunc/identification.hpp"
#include "idfunc/linalg.hpp"

namespace idfunc {

/// A matrix-valued function h: A -> R^(k x k) acting on moment
/// functions by x-dependent left multiplication.
class MatrixTransform {
public:
    virtual ~MatrixTransform() = default;
    virtual int dim() const = 0;
    virtual Matrix eval(const Vec& x) const = 0;
    virtual std::string key() const = 0;
};

using TransformPtr = std::shared_ptr<const MatrixTransform>;

TransformPtr make_identity_transform(int dim);
TransformPtr make_constant_transform(Matrix m);
TransformPtr make_scaled_identity(int dim, double c);
/// Unit lower-triangular shear [[1,0],[2*x1,1]] that turns the centered
/// second-moment condition into the raw one.
TransformPtr make_mean_var_shear();
/// Unit lower-triangular shear [[1,0],[x1/alpha,1]] that adds the
/// tail-correction term to the truncated-expectation condition.
TransformPtr make_quantile_es_shear(double alpha);
/// Piecewise-linear interpolation of matrices tabulated along one
/// action coordinate; refuses to extrapolate beyond the nodes.
TransformPtr make_tabulated_transform(int coord, std::vector<double> nodes,
                                      std::vector<Matrix> values);
/// Pointwise product x -> outer(x) * inner(x).
TransformPtr make_product_transform(TransformPtr outer, TransformPtr inner);

/// Parse "identity" | "scaled-identity:C" | "mean-var-shear" |
/// "quantile-es-shear:ALPHA" | "constant:[[a,b],[c,d]]".
TransformPtr make_transform(const std::string& key, int dim);

/// The moment function x,y -> h(x) V(x,y); expected values transform the
/// same way.
IdFuncPtr apply_transform(TransformPtr h, IdFuncPtr v);

struct RankCheck {
    bool full_rank;
    double det;
};
RankCheck is_full_rank(const MatrixTransform& h, const Vec& x, double tol = 1e-12);

struct RecoveredTransform {
    Matrix h;
    double det = 0.0;
    double heldout_residual = 0.0;
    double battery_condition = 0.0;
};

/// Recover the matrix M with expected_Vprime(x, F) = M expected_V(x, F)
/// from the first k battery distributions, then certify on the held-out
/// remainder. Throws SingularBatteryError when the solve columns are
/// nearly dependent and InconsistentPairError when a held-out residual
/// exceeds the tolerance (the two moment functions do not identify the
/// same functional relative to this class).
RecoveredTransform recover_h(const IdentificationFunction& v,
                             const IdentificationFunction& v_prime, const Vec& x,
                             std::span<const AnyDistribution> battery,
                             double residual_tol = 1e-6, double condition_limit = 1e8);

struct SimplexCheck {
    bool origin_interior;
    Vec barycentric;
    double scaled_volume;
};

/// Richness check at x: do the k+1 expected moment vectors span a
/// nondegenerate simplex with the origin strictly inside? Barycentric
/// coordinates of the origin are returned; all must exceed the
/// positivity cutoff.
SimplexCheck check_v1(const IdentificationFunction& v, const Vec& x,
                      std::span<const AnyDistribution> battery,
                      double positivity_cutoff = 1e-9, double volume_tol = 1e-10);

/// Max over the grids of || V'(x,y) - h(x) V(x,y) ||_inf.
double pointwise_osband_check(const IdentificationFunction& v,
                              const IdentificationFunction& v_prime, const MatrixTransform& h,
                              std::span<const Vec> x_grid, std::span<const Vec> y_grid);

}  // namespace idfunc
