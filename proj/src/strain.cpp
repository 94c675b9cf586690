#include "shellkorn/strain.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace shellkorn {

namespace {

double max_norm(const TensorField& f) {
    double m = 0.0;
    for (double v : f.raw()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

Displacement::Displacement(const SurfacePatch& patch,
                           const std::function<Vec3(double, double)>& y, ClampSet clamp)
    : patch_(&patch), tangential_(patch, 1), normal_(patch, 0), clamp_(clamp) {
    const int n_t = patch.n_t(), n_s = patch.n_s();
    y_.resize(static_cast<size_t>(patch.num_nodes()));
    for (int j = 0; j <= n_s; ++j)
        for (int i = 0; i < n_t; ++i) {
            Vec3 val = y(patch.t_coord(i), patch.s_coord(j));
            if (clamp == ClampSet::BothEdges && (j == 0 || j == n_s)) val.setZero();
            y_[patch.node_index(i, j)] = val;
            const NodeGeometry& nd = patch.node(i, j);
            // covariant tangential components W_i = <y, e_i>, normal part w = <y, n>
            tangential_.at(i, j, 0) = val.dot(nd.e1);
            tangential_.at(i, j, 1) = val.dot(nd.e2);
            normal_.at(i, j) = val.dot(nd.normal);
        }
}

Vec3 Displacement::ambient(int i, int j) const { return y_[patch_->node_index(i, j)]; }

TensorField strain(const Displacement& y) {
    const SurfacePatch& p = y.patch();
    TensorField sdw = sym_part(covariant_derivative(y.tangential()));
    TensorField wpi = multiply_scalar(y.normal_part(), second_form_field(p));
    return add(sdw, wpi);
}

AuxFields aux_fields(const Displacement& y) {
    const SurfacePatch& p = y.patch();
    TensorField v = scale(divergence(q_rotate(y.tangential())), 0.5);
    TensorField dw = covariant_derivative(y.normal_part());
    TensorField shapeW = tensor_apply(second_form_field(p), y.tangential());
    TensorField V = q_rotate(add(dw, shapeW, 1.0, -1.0));
    return AuxFields{std::move(v), std::move(V)};
}

StrainSystemResiduals strain_system_residuals(const Displacement& y) {
    const SurfacePatch& p = y.patch();
    TensorField Pi = second_form_field(p);
    TensorField trPi = trace(Pi);
    TensorField U = strain(y);
    AuxFields aux = aux_fields(y);

    StrainSystemResiduals res;
    {
        // Dw - shape(W) + QV, zero by the construction of V
        TensorField dw = covariant_derivative(y.normal_part());
        TensorField shapeW = tensor_apply(Pi, y.tangential());
        TensorField lhs = add(add(dw, shapeW, 1.0, -1.0), q_rotate(aux.V));
        res.gradient_row = max_norm(lhs);
    }
    {
        // div W + (tr Pi) w - tr U
        TensorField lhs = add(divergence(y.tangential()),
                              multiply_scalar(trPi, y.normal_part()));
        res.trace_row = max_norm(add(lhs, trace(U), 1.0, -1.0));
    }
    {
        // Dv - shape(V) - Q div(QUQ)
        TensorField Q = q_field(p);
        TensorField quq = compose(compose(Q, U), Q);
        TensorField lhs = add(covariant_derivative(aux.v), tensor_apply(Pi, aux.V), 1.0, -1.0);
        res.aux_gradient_row = max_norm(add(lhs, q_rotate(divergence(quq)), 1.0, -1.0));
    }
    {
        // div V + (tr Pi) v + <Q shape, U>
        TensorField Q = q_field(p);
        TensorField qpi = compose(Q, Pi);
        TensorField lhs = add(divergence(aux.V), multiply_scalar(trPi, aux.v));
        res.aux_divergence_row = max_norm(add(lhs, inner(qpi, U)));
    }
    return res;
}

namespace {

// Bilinear-element mass and stiffness on the parameter grid with the surface
// measure: K_ab = int g^{ij} d_i phi_a d_j phi_b sqrt(g), M_ab = int phi_a phi_b sqrt(g).
// Periodic in t, natural in s. 2x2 Gauss points per cell; geometry sampled at
// the Gauss points from the analytic map.
void assemble_surface_forms(const SurfacePatch& p, Eigen::SparseMatrix<double>& K,
                            Eigen::SparseMatrix<double>& M) {
    const int n_t = p.n_t(), n_s = p.n_s();
    const int n = p.num_nodes();
    const double dt = p.dt(), ds = p.ds();
    std::vector<Eigen::Triplet<double>> kt, mt;
    kt.reserve(static_cast<size_t>(n_t) * n_s * 16);
    mt.reserve(static_cast<size_t>(n_t) * n_s * 16);
    const double gp = 0.5773502691896257645;  // 1/sqrt(3)
    const double gauss[2] = {-gp, gp};
    const SurfaceMap& map = p.map();
    for (int j = 0; j < n_s; ++j)
        for (int i = 0; i < n_t; ++i) {
            int nodes[4] = {p.node_index(i, j), p.node_index(i + 1, j), p.node_index(i, j + 1),
                            p.node_index(i + 1, j + 1)};
            double ke[4][4] = {}, me[4][4] = {};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double xi = gauss[a], eta = gauss[b];  // in [-1,1]^2
                    const double t = p.t_coord(i) + (xi + 1.0) * 0.5 * dt;
                    const double s = p.s_coord(j) + (eta + 1.0) * 0.5 * ds;
                    SurfaceJet jet = map.jet(t, s);
                    Mat2 g;
                    g << jet.d_t.dot(jet.d_t), jet.d_t.dot(jet.d_s), jet.d_s.dot(jet.d_t),
                        jet.d_s.dot(jet.d_s);
                    const Mat2 gi = g.inverse();
                    const double w = 0.25 * dt * ds * std::sqrt(g.determinant());
                    // shape functions on the cell and their (t,s) gradients
                    double N[4] = {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
                                   0.25 * (1 - xi) * (1 + eta), 0.25 * (1 + xi) * (1 + eta)};
                    double dN[4][2] = {{-0.25 * (1 - eta), -0.25 * (1 - xi)},
                                       {0.25 * (1 - eta), -0.25 * (1 + xi)},
                                       {-0.25 * (1 + eta), 0.25 * (1 - xi)},
                                       {0.25 * (1 + eta), 0.25 * (1 + xi)}};
                    for (int q = 0; q < 4; ++q) {
                        dN[q][0] *= 2.0 / dt;
                        dN[q][1] *= 2.0 / ds;
                    }
                    for (int q = 0; q < 4; ++q)
                        for (int r = 0; r < 4; ++r) {
                            double grad = 0.0;
                            for (int u = 0; u < 2; ++u)
                                for (int vv = 0; vv < 2; ++vv)
                                    grad += gi(u, vv) * dN[q][u] * dN[r][vv];
                            ke[q][r] += w * grad;
                            me[q][r] += w * N[q] * N[r];
                        }
                }
            for (int q = 0; q < 4; ++q)
                for (int r = 0; r < 4; ++r) {
                    kt.emplace_back(nodes[q], nodes[r], ke[q][r]);
                    mt.emplace_back(nodes[q], nodes[r], me[q][r]);
                }
        }
    K.resize(n, n);
    M.resize(n, n);
    K.setFromTriplets(kt.begin(), kt.end());
    M.setFromTriplets(mt.begin(), mt.end());
}

}  // namespace

double dual_norm(const SurfacePatch& patch, const TensorField& f) {
    if (f.order() != 0) throw std::invalid_argument("dual_norm: order-0 field required");
    Eigen::SparseMatrix<double> K, M;
    assemble_surface_forms(patch, K, M);
    Eigen::VectorXd fv(patch.num_nodes());
    for (int j = 0; j <= patch.n_s(); ++j)
        for (int i = 0; i < patch.n_t(); ++i) fv(patch.node_index(i, j)) = f.at(i, j);
    Eigen::SparseMatrix<double> A = K + M;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dual_norm: singular Riesz system (mesh defect)");
    Eigen::VectorXd rhs = M * fv;
    Eigen::VectorXd u = solver.solve(rhs);
    const double val = fv.dot(M * u);
    return std::sqrt(std::max(0.0, val));
}

namespace {

double boundary_l2_sq(const Displacement& y) {
    const SurfacePatch& p = y.patch();
    const TensorField& W = y.tangential();
    TensorField lo(p, 0), hi(p, 0);
    for (int i = 0; i < p.n_t(); ++i) {
        const Mat2& gi0 = p.node(i, 0).metric_inv;
        const Mat2& gi1 = p.node(i, p.n_s()).metric_inv;
        lo.at(i, 0) = W.vec(i, 0).transpose() * gi0 * W.vec(i, 0);
        hi.at(i, p.n_s()) = W.vec(i, p.n_s()).transpose() * gi1 * W.vec(i, p.n_s());
    }
    return integrate_boundary(lo, 0) + integrate_boundary(hi, p.n_s());
}

}  // namespace

double displacement_bound_ratio(const Displacement& y) {
    const SurfacePatch& p = y.patch();
    TensorField U = strain(y);
    const double w_norm = l2_norm(y.tangential());
    const double dn = dual_norm(p, y.normal_part());
    const double u_norm = l2_norm(U);
    const double bnd = boundary_l2_sq(y);
    const double denom = u_norm * u_norm + bnd;
    if (!(denom > 0.0))
        throw std::runtime_error("displacement_bound_ratio: degenerate sample (zero strain, zero boundary trace)");
    return (w_norm * w_norm + dn * dn) / denom;
}

double normal_bound_ratio(const Displacement& y) {
    if (y.clamp() != ClampSet::BothEdges)
        throw std::invalid_argument("normal_bound_ratio: displacement must be clamped at both edges");
    TensorField U = strain(y);
    const double u_norm = l2_norm(U);
    const double dw_norm = l2_norm(covariant_derivative(y.normal_part()));
    const double w_norm = l2_norm(y.normal_part());
    const double denom = dw_norm * u_norm + u_norm * u_norm;
    if (!(denom > 0.0)) {
        if (w_norm * w_norm <= 1e-28) return std::numeric_limits<double>::quiet_NaN();  // 0/0
        throw std::runtime_error(
            "normal_bound_ratio: zero denominator with nonzero numerator (counterexample candidate)");
    }
    return w_norm * w_norm / denom;
}

std::function<Vec3(double, double)> random_displacement(const BandSpec& band, uint64_t seed,
                                                        bool clamped) {
    auto gen = std::make_shared<RandomFieldGen>(band, seed, 3);
    const double b0 = band.b0, b1 = band.b1;
    const double half = 0.5 * (b0 + b1);
    const double norm = half * half * half * half;
    return [gen, b0, b1, norm, clamped](double t, double s) {
        Vec3 v(gen->eval(0, t, s), gen->eval(1, t, s), gen->eval(2, t, s));
        if (clamped) {
            const double a = s + b0, b = b1 - s;
            v *= a * a * b * b / norm;
        }
        return v;
    };
}

}  // namespace shellkorn
