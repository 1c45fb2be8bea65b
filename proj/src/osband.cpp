#include "idfunc/osband.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace idfunc {

namespace {

std::string fmt_g(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", a);
    return buf;
}

class IdentityTransform final : public MatrixTransform {
public:
    explicit IdentityTransform(int dim) : dim_(dim) {}
    int dim() const override { return dim_; }
    Matrix eval(const Vec&) const override { return Matrix::identity(dim_); }
    std::string key() const override { return "identity"; }

private:
    int dim_;
};

class ConstantTransform final : public MatrixTransform {
public:
    explicit ConstantTransform(Matrix m, std::string key) : m_(std::move(m)), key_(std::move(key)) {
        if (!m_.square()) throw DimensionMismatchError("constant transform: matrix not square");
    }
    int dim() const override { return m_.rows(); }
    Matrix eval(const Vec&) const override { return m_; }
    std::string key() const override { return key_; }

private:
    Matrix m_;
    std::string key_;
};

class MeanVarShear final : public MatrixTransform {
public:
    int dim() const override { return 2; }
    Matrix eval(const Vec& x) const override {
        if (x.size() != 2) throw DimensionMismatchError("mean-var-shear: needs a 2-vector");
        return Matrix::from_rows({{1.0, 0.0}, {2.0 * x[0], 1.0}});
    }
    std::string key() const override { return "mean-var-shear"; }
};

class QuantileEsShear final : public MatrixTransform {
public:
    explicit QuantileEsShear(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw Error("quantile-es-shear: level must lie in (0,1)");
    }
    int dim() const override { return 2; }
    Matrix eval(const Vec& x) const override {
        if (x.size() != 2) throw DimensionMismatchError("quantile-es-shear: needs a 2-vector");
        return Matrix::from_rows({{1.0, 0.0}, {x[0] / alpha_, 1.0}});
    }
    std::string key() const override { return "quantile-es-shear:" + fmt_g(alpha_); }

private:
    double alpha_;
};

class TabulatedTransform final : public MatrixTransform {
public:
    TabulatedTransform(int coord, std::vector<double> nodes, std::vector<Matrix> values)
        : coord_(coord), nodes_(std::move(nodes)), values_(std::move(values)) {
        if (nodes_.size() < 2 || nodes_.size() != values_.size())
            throw Error("tabulated transform: need matching nodes and matrices (>= 2)");
        if (!std::is_sorted(nodes_.begin(), nodes_.end()))
            throw Error("tabulated transform: nodes must be sorted");
        for (const Matrix& m : values_)
            if (!m.square() || m.rows() != values_.front().rows())
                throw DimensionMismatchError("tabulated transform: inconsistent matrices");
    }
    int dim() const override { return values_.front().rows(); }
    Matrix eval(const Vec& x) const override {
        const double t = x.at(static_cast<std::size_t>(coord_));
        if (t < nodes_.front() || t > nodes_.back())
            throw DomainError("tabulated transform: point outside the tabulated range");
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
        std::size_t hi = std::min<std::size_t>(
            static_cast<std::size_t>(it - nodes_.begin()), nodes_.size() - 1);
        if (hi == 0) hi = 1;
        const std::size_t lo = hi - 1;
        const double w = (t - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
        Matrix out(dim(), dim());
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j)
                out(i, j) = (1.0 - w) * values_[lo](i, j) + w * values_[hi](i, j);
        return out;
    }
    std::string key() const override { return "tabulated"; }

private:
    int coord_;
    std::vector<double> nodes_;
    std::vector<Matrix> values_;
};

class ProductTransform final : public MatrixTransform {
public:
    ProductTransform(TransformPtr outer, TransformPtr inner)
        : outer_(std::move(outer)), inner_(std::move(inner)) {
        if (outer_->dim() != inner_->dim())
            throw DimensionMismatchError("product transform: dimension mismatch");
    }
    int dim() const override { return outer_->dim(); }
    Matrix eval(const Vec& x) const override { return outer_->eval(x) * inner_->eval(x); }
    std::string key() const override { return outer_->key() + "*" + inner_->key(); }

private:
    TransformPtr outer_;
    TransformPtr inner_;
};

/// h(x) V(x, y), with expected values transformed the same way.
class TransformedIdFunc final : public IdentificationFunction {
public:
    TransformedIdFunc(TransformPtr h, IdFuncPtr inner) : h_(std::move(h)), inner_(std::move(inner)) {
        if (h_->dim() != inner_->output_dim())
            throw DimensionMismatchError("apply_transform: h dimension " +
                                         std::to_string(h_->dim()) + " vs moment dimension " +
                                         std::to_string(inner_->output_dim()));
    }
    int output_dim() const override { return inner_->output_dim(); }
    int obs_dim() const override { return inner_->obs_dim(); }
    const ActionDomain& domain() const override { return inner_->domain(); }
    std::string key() const override { return h_->key() + "*" + inner_->key(); }
    Vec evaluate(const Vec& x, const Vec& y) const override {
        return h_->eval(x) * inner_->evaluate(x, y);
    }
    Vec evaluate_smoothed(const Vec& x, const Vec& y, double delta) const override {
        return h_->eval(x) * inner_->evaluate_smoothed(x, y, delta);
    }
    Vec expected(const Vec& x, const AnyDistribution& f) const override {
        return h_->eval(x) * inner_->expected(x, f);
    }
    std::vector<double> discontinuities(const Vec& x) const override {
        return inner_->discontinuities(x);
    }
    const IdentificationFunction& inner() const { return *inner_; }

private:
    TransformPtr h_;
    IdFuncPtr inner_;
};

}  // namespace

TransformPtr make_identity_transform(int dim) {
    return std::make_shared<IdentityTransform>(dim);
}

TransformPtr make_constant_transform(Matrix m) {
    std::ostringstream key;
    key << "constant:[";
    for (int i = 0; i < m.rows(); ++i) {
        if (i) key << ",";
        key << "[";
        for (int j = 0; j < m.cols(); ++j) {
            if (j) key << ",";
            key << fmt_g(m(i, j));
        }
        key << "]";
    }
    key << "]";
    return std::make_shared<ConstantTransform>(std::move(m), key.str());
}

TransformPtr make_scaled_identity(int dim, double c) {
    Matrix m = Matrix::identity(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = c;
    return std::make_shared<ConstantTransform>(std::move(m), "scaled-identity:" + fmt_g(c));
}

TransformPtr make_mean_var_shear() { return std::make_shared<MeanVarShear>(); }

TransformPtr make_quantile_es_shear(double alpha) {
    return std::make_shared<QuantileEsShear>(alpha);
}

TransformPtr make_tabulated_transform(int coord, std::vector<double> nodes,
                                      std::vector<Matrix> values) {
    return std::make_shared<TabulatedTransform>(coord, std::move(nodes), std::move(values));
}

TransformPtr make_product_transform(TransformPtr outer, TransformPtr inner) {
    return std::make_shared<ProductTransform>(std::move(outer), std::move(inner));
}

TransformPtr make_transform(const std::string& key, int dim) {
    if (key == "identity") return make_identity_transform(dim);
    if (key == "mean-var-shear") return make_mean_var_shear();
    const auto colon = key.find(':');
    const std::string name = key.substr(0, colon);
    if (name == "quantile-es-shear") {
        if (colon == std::string::npos) throw ParseError("quantile-es-shear needs a level");
        return make_quantile_es_shear(std::stod(key.substr(colon + 1)));
    }
    if (name == "scaled-identity") {
        if (colon == std::string::npos) throw ParseError("scaled-identity needs a factor");
        return make_scaled_identity(dim, std::stod(key.substr(colon + 1)));
    }
    if (name == "constant") {
        if (colon == std::string::npos) throw ParseError("constant transform needs a matrix");
        // parse [[a,b],[c,d]] with a forgiving scanner
        std::vector<std::vector<double>> rows;
        std::vector<double> row;
        std::string cur;
        for (char ch : key.substr(colon + 1)) {
            if (ch == '[') continue;
            if (ch == ']' || ch == ',') {
                if (!cur.empty()) {
                    row.push_back(std::stod(cur));
                    cur.clear();
                }
                if (ch == ']' && !row.empty()) {
                    rows.push_back(row);
                    row.clear();
                }
                continue;
            }
            if (!std::isspace(static_cast<unsigned char>(ch))) cur += ch;
        }
        if (rows.empty()) throw ParseError("constant transform: empty matrix");
        Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.front().size())
                throw ParseError("constant transform: ragged matrix");
            for (std::size_t j = 0; j < rows[i].size(); ++j)
                m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
        }
        return make_constant_transform(std::move(m));
    }
    throw ParseError("unknown transform key '" + key + "'");
}

IdFuncPtr apply_transform(TransformPtr h, IdFuncPtr v) {
    return std::make_shared<TransformedIdFunc>(std::move(h), std::move(v));
}

RankCheck is_full_rank(const MatrixTransform& h, const Vec& x, double tol) {
    const double det = determinant(h.eval(x));
    return {std::abs(det) > tol, det};
}

RecoveredTransform recover_h(const IdentificationFunction& v,
                             const IdentificationFunction& v_prime, const Vec& x,
                             std::span<const AnyDistribution> battery, double residual_tol,
                             double condition_limit) {
    const int k = v.output_dim();
    if (v_prime.output_dim() != k)
        throw DimensionMismatchError("recover_h: moment dimensions differ");
    if (static_cast<int>(battery.size()) < k + 1)
        throw Error("recover_h: need k solve distributions plus at least one held out");
    if (!v.domain().interior_contains(x))
        throw DomainError("recover_h: x must lie in the interior of the action domain");

    Matrix b(k, k);
    Matrix c(k, k);
    for (int i = 0; i < k; ++i) {
        b.set_col(i, expected_v(v, x, battery[i]));
        c.set_col(i, expected_v(v_prime, x, battery[i]));
    }
    const double cond = condition_number(b);
    if (!(cond < condition_limit))
        throw SingularBatteryError("recover_h: battery moment vectors nearly dependent (cond=" +
                                   std::to_string(cond) + ")");

    // M B = C  <=>  B^T M^T = C^T
    const Matrix m = solve(b.transposed(), c.transposed()).transposed();

    RecoveredTransform out;
    out.h = m;
    out.det = determinant(m);
    out.battery_condition = cond;
    double residual = 0.0;
    for (std::size_t j = k; j < battery.size(); ++j) {
        const Vec lhs = expected_v(v_prime, x, battery[j]);
        const Vec rhs = m * expected_v(v, x, battery[j]);
        Vec diff(lhs.size());
        for (std::size_t i = 0; i < lhs.size(); ++i) diff[i] = lhs[i] - rhs[i];
        residual = std::max(residual, inf_norm(diff));
    }
    out.heldout_residual = residual;
    if (residual > residual_tol)
        throw InconsistentPairError(
            "recover_h: held-out residual " + std::to_string(residual) +
                " exceeds tolerance; the pair is not linked by any matrix function on this class",
            residual);
    return out;
}

SimplexCheck check_v1(const IdentificationFunction& v, const Vec& x,
                      std::span<const AnyDistribution> battery, double positivity_cutoff,
                      double volume_tol) {
    const int k = v.output_dim();
    if (static_cast<int>(battery.size()) != k + 1)
        throw Error("check_v1: need exactly k+1 distributions");
    if (!v.domain().interior_contains(x))
        throw DomainError("check_v1: x must lie in the interior of the action domain");

    std::vector<Vec> points;
    points.reserve(battery.size());
    for (const auto& f : battery) points.push_back(expected_v(v, x, f));

    // simplex nondegeneracy, scale-free: columns of edge matrix scaled
    // to unit max-norm before taking the volume
    Matrix edges(k, k);
    for (int j = 0; j < k; ++j) {
        Vec e(k);
        for (int i = 0; i < k; ++i) e[i] = points[j + 1][i] - points[0][i];
        const double scale = inf_norm(e);
        if (scale == 0.0) throw DegenerateSimplexError("check_v1: coincident moment vectors");
        for (int i = 0; i < k; ++i) e[i] /= scale;
        edges.set_col(j, e);
    }
    double volume = std::abs(determinant(edges));
    for (int i = 2; i <= k; ++i) volume /= i;
    if (volume <= volume_tol)
        throw DegenerateSimplexError("check_v1: moment vectors span a degenerate simplex");

    // barycentric coordinates of the origin: sum lambda_i p_i = 0,
    // sum lambda_i = 1
    Matrix a(k + 1, k + 1);
    Vec rhs(k + 1, 0.0);
    for (int j = 0; j <= k; ++j) {
        for (int i = 0; i < k; ++i) a(i, j) = points[j][i];
        a(k, j) = 1.0;
    }
    rhs[k] = 1.0;
    SimplexCheck out;
    out.barycentric = solve(a, rhs);
    out.scaled_volume = volume;
    out.origin_interior = true;
    for (double l : out.barycentric)
        if (!(l > positivity_cutoff)) out.origin_interior = false;
    return out;
}

double pointwise_osband_check(const IdentificationFunction& v,
                              const IdentificationFunction& v_prime, const MatrixTransform& h,
                              std::span<const Vec> x_grid, std::span<const Vec> y_grid) {
    double worst = 0.0;
    for (const Vec& x : x_grid) {
        const Matrix hx = h.eval(x);
        for (const Vec& y : y_grid) {
            const Vec lhs = v_prime.evaluate(x, y);
            const Vec rhs = hx * v.evaluate(x, y);
            for (std::size_t i = 0; i < lhs.size(); ++i)
                worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
        }
    }
    return worst;
}

}  // namespace idfunc
