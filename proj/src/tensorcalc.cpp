#include "shellkorn/tensorcalc.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace shellkorn {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// partials of one component grid; periodic second-order central in t.
// In s the stencils are uniformly fourth order (five points, skewed near the
// ends): composed operators like div D stay second order in the max norm,
// which three-point boundary stencils would not give.
void partials(const TensorField& f, int c, TensorField& d_t, int ct, TensorField& d_s, int cs) {
    const SurfacePatch& p = f.patch();
    const int n_t = p.n_t(), n_s = p.n_s();
    const double dt = p.dt(), ds = p.ds();
    // five-point first-derivative weights at offsets 0..4 from the left node
    static const double w0[5] = {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -0.25};
    static const double w1[5] = {-0.25, -5.0 / 6, 1.5, -0.5, 1.0 / 12};
    static const double wc[5] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
    for (int j = 0; j <= n_s; ++j) {
        const double* w;
        double sign = 1.0;
        int base;  // leftmost node of the stencil
        if (j == 0) {
            w = w0;
            base = 0;
        } else if (j == 1) {
            w = w1;
            base = 0;
        } else if (j == n_s - 1) {
            w = w1;
            sign = -1.0;
            base = n_s;  // mirrored
        } else if (j == n_s) {
            w = w0;
            sign = -1.0;
            base = n_s;
        } else {
            w = wc;
            base = j - 2;
        }
        const int step = sign > 0 ? 1 : -1;
        for (int i = 0; i < n_t; ++i) {
            d_t.at(i, j, ct) = (f.at(i + 1, j, c) - f.at(i - 1 + n_t, j, c)) / (2.0 * dt);
            double dv = 0.0;
            for (int k = 0; k < 5; ++k) dv += w[k] * f.at(i, base + step * k, c);
            d_s.at(i, j, cs) = sign * dv / ds;
        }
    }
}

void check_same_patch(const TensorField& a, const TensorField& b) {
    if (&a.patch() != &b.patch())
        throw std::invalid_argument("tensor fields live on different patches");
}

}  // namespace

TensorField covariant_derivative(const TensorField& f) {
    const SurfacePatch& p = f.patch();
    if (f.order() == 0) {
        TensorField out(p, 1);
        partials(f, 0, out, 0, out, 1);
        return out;
    }
    if (f.order() == 1) {
        // (DW)_{ij} = d_j W_i - Gamma^k_{ij} W_k
        TensorField out(p, 2);
        TensorField dW_t(p, 2), dW_s(p, 2);  // dW_t holds d_t W_i in slots i
        for (int comp = 0; comp < 2; ++comp) partials(f, comp, dW_t, comp, dW_s, comp);
        for (int j = 0; j <= p.n_s(); ++j)
            for (int i = 0; i < p.n_t(); ++i) {
                const NodeGeometry& nd = p.node(i, j);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        double v = (b == 0) ? dW_t.at(i, j, a) : dW_s.at(i, j, a);
                        for (int k = 0; k < 2; ++k)
                            v -= nd.christoffel[k][a][b] * f.at(i, j, k);
                        out.at(i, j, 2 * a + b) = v;
                    }
            }
        return out;
    }
    throw std::invalid_argument("covariant_derivative: order-2 input unsupported");
}

TensorField divergence(const TensorField& f) {
    const SurfacePatch& p = f.patch();
    if (f.order() == 1) {
        TensorField DW = covariant_derivative(f);
        TensorField out(p, 0);
        for (int j = 0; j <= p.n_s(); ++j)
            for (int i = 0; i < p.n_t(); ++i) {
                const Mat2& gi = p.node(i, j).metric_inv;
                double v = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) v += gi(a, b) * DW.at(i, j, 2 * a + b);
                out.at(i, j) = v;
            }
        return out;
    }
    if (f.order() == 2) {
        // (div U)_i = g^{jk} (d_k U_{ij} - Gamma^l_{ki} U_{lj} - Gamma^l_{kj} U_{il})
        TensorField out(p, 1);
        TensorField d_t(p, 2), d_s(p, 2);  // partials of all four components
        for (int c = 0; c < 4; ++c) partials(f, c, d_t, c, d_s, c);
        for (int j = 0; j <= p.n_s(); ++j)
            for (int i = 0; i < p.n_t(); ++i) {
                const NodeGeometry& nd = p.node(i, j);
                for (int a = 0; a < 2; ++a) {
                    double v = 0.0;
                    for (int b = 0; b < 2; ++b)
                        for (int k = 0; k < 2; ++k) {
                            double dk = (k == 0) ? d_t.at(i, j, 2 * a + b) : d_s.at(i, j, 2 * a + b);
                            for (int l = 0; l < 2; ++l)
                                dk -= nd.christoffel[l][k][a] * f.at(i, j, 2 * l + b) +
                                      nd.christoffel[l][k][b] * f.at(i, j, 2 * a + l);
                            v += nd.metric_inv(b, k) * dk;
                        }
                    out.at(i, j, a) = v;
                }
            }
        return out;
    }
    throw std::invalid_argument("divergence: needs an order-1 or order-2 field");
}

TensorField add(const TensorField& a, const TensorField& b, double ca, double cb) {
    check_same_patch(a, b);
    if (a.order() != b.order()) throw std::invalid_argument("order mismatch in add");
    TensorField out(a.patch(), a.order());
    for (size_t k = 0; k < out.raw().size(); ++k) out.raw()[k] = ca * a.raw()[k] + cb * b.raw()[k];
    return out;
}

TensorField scale(const TensorField& a, double c) {
    TensorField out(a.patch(), a.order());
    for (size_t k = 0; k < out.raw().size(); ++k) out.raw()[k] = c * a.raw()[k];
    return out;
}

TensorField multiply_scalar(const TensorField& scalar, const TensorField& f) {
    check_same_patch(scalar, f);
    if (scalar.order() != 0) throw std::invalid_argument("multiply_scalar: first arg must be order 0");
    TensorField out(f.patch(), f.order());
    const SurfacePatch& p = f.patch();
    for (int j = 0; j <= p.n_s(); ++j)
        for (int i = 0; i < p.n_t(); ++i)
            for (int c = 0; c < f.comps(); ++c) out.at(i, j, c) = scalar.at(i, j) * f.at(i, j, c);
    return out;
}

TensorField trace(const TensorField& u) {
    if (u.order() != 2) throw std::invalid_argument("trace: order-2 field required");
    const SurfacePatch& p = u.patch();
    TensorField out(p, 0);
    for (int j = 0; j <= p.n_s(); ++j)
        for (int i = 0; i < p.n_t(); ++i)
            out.at(i, j) = (p.node(i, j).metric_inv * u.mat(i, j)).trace();
    return out;
}

TensorField transpose(const TensorField& u) {
    if (u.order() != 2) throw std::invalid_argument("transpose: order-2 field required");
    TensorField out(u.patch(), 2);
    const SurfacePatch& p = u.patch();
    for (int j = 0; j <= p.n_s(); ++j)
        for (int i = 0; i < p.n_t(); ++i) out.set_mat(i, j, u.mat(i, j).transpose());
    return out;
}

TensorField sym_part(const TensorField& u) {
    if (u.order() != 2) throw std::invalid_argument("sym_part: order-2 field required");
    TensorField out(u.patch(), 2);
    const SurfacePatch& p = u.patch();
    for (int j = 0; j <= p.n_s(); ++j)
        for (int i = 0; i < p.n_t(); ++i) {
            Mat2 m = u.mat(i, j);
            out.set_mat(i, j, 0.5 * (m + m.transpose()));
        }
    return out;
}

TensorField compose(const TensorField& a, const TensorField& b) {
    check_same_patch(a, b);
    if (a.order() != 2 || b.order() != 2) throw std::invalid_argument("compose: order-2 fields required");
    TensorField out(a.patch(), 2);
    const SurfacePatch& p = a.patch();
    for (int j = 0; j <= p.n_s(); ++j)
        for (int i = 0; i < p.n_t(); ++i)
            out.set_mat(i, j, a.mat(i, j) * p.node(i, j).metric_inv * b.mat(i, j));
    return out;
}

TensorField tensor_apply(const TensorField& a, const TensorField& w) {
    check_same_patch(a, w);
    if (a.order() != 2 || w.order() != 1)
        throw std::invalid_argument("tensor_apply: order-2 and order-1 fields required");
    TensorField out(w.patch(), 1);
    const SurfacePatch& p = w.patch();
    for (int j = 0; j <= p.n_s(); ++j)
        for (int i = 0; i < p.n_t(); ++i)
            out.set_vec(i, j, a.mat(i, j) * p.node(i, j).metric_inv * w.vec(i, j));
    return out;
}

TensorField inner(const TensorField& a, const TensorField& b) {
    check_same_patch(a, b);
    if (a.order() != b.order()) throw std::invalid_argument("inner: order mismatch");
    const SurfacePatch& p = a.patch();
    TensorField out(p, 0);
    for (int j = 0; j <= p.n_s(); ++j)
        for (int i = 0; i < p.n_t(); ++i) {
            const Mat2& gi = p.node(i, j).metric_inv;
            double v = 0.0;
            if (a.order() == 0) {
                v = a.at(i, j) * b.at(i, j);
            } else if (a.order() == 1) {
                v = a.vec(i, j).transpose() * gi * b.vec(i, j);
            } else {
                v = (gi * a.mat(i, j) * gi * b.mat(i, j).transpose()).trace();
            }
            out.at(i, j) = v;
        }
    return out;
}

TensorField identity_field(const SurfacePatch& patch) {
    TensorField out(patch, 2);
    for (int j = 0; j <= patch.n_s(); ++j)
        for (int i = 0; i < patch.n_t(); ++i) out.set_mat(i, j, patch.node(i, j).metric);
    return out;
}

TensorField q_field(const SurfacePatch& patch) {
    TensorField out(patch, 2);
    for (int j = 0; j <= patch.n_s(); ++j)
        for (int i = 0; i < patch.n_t(); ++i) out.set_mat(i, j, patch.node(i, j).q_form);
    return out;
}

TensorField second_form_field(const SurfacePatch& patch) {
    TensorField out(patch, 2);
    for (int j = 0; j <= patch.n_s(); ++j)
        for (int i = 0; i < patch.n_t(); ++i) out.set_mat(i, j, patch.node(i, j).second_form);
    return out;
}

TensorField scalar_field(const SurfacePatch& patch,
                         const std::function<double(double, double)>& f) {
    TensorField out(patch, 0);
    for (int j = 0; j <= patch.n_s(); ++j)
        for (int i = 0; i < patch.n_t(); ++i)
            out.at(i, j) = f(patch.t_coord(i), patch.s_coord(j));
    return out;
}

TensorField q_rotate(const TensorField& w) {
    if (w.order() != 1) throw std::invalid_argument("q_rotate: order-1 field required");
    const SurfacePatch& p = w.patch();
    TensorField out(p, 1);
    for (int j = 0; j <= p.n_s(); ++j)
        for (int i = 0; i < p.n_t(); ++i) {
            const NodeGeometry& nd = p.node(i, j);
            out.set_vec(i, j, nd.q_form * nd.metric_inv * w.vec(i, j));
        }
    return out;
}

double integrate(const TensorField& scalar) {
    if (scalar.order() != 0) throw std::invalid_argument("integrate: order-0 field required");
    const SurfacePatch& p = scalar.patch();
    const int n_t = p.n_t(), n_s = p.n_s();
    double total = 0.0;
    for (int j = 0; j <= n_s; ++j) {
        // composite Simpson weights in s
        double ws;
        if (j == 0 || j == n_s) ws = 1.0 / 3.0;
        else if (j % 2 == 1) ws = 4.0 / 3.0;
        else ws = 2.0 / 3.0;
        for (int i = 0; i < n_t; ++i)
            total += ws * scalar.at(i, j) * p.node(i, j).sqrt_det_g;
    }
    return total * p.dt() * p.ds();
}

double l2_inner(const TensorField& a, const TensorField& b) { return integrate(inner(a, b)); }

double l2_norm(const TensorField& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

double integrate_boundary(const TensorField& scalar, int j) {
    if (scalar.order() != 0) throw std::invalid_argument("integrate_boundary: order-0 field required");
    const SurfacePatch& p = scalar.patch();
    if (j != 0 && j != p.n_s()) throw std::invalid_argument("boundary index must be 0 or n_s");
    double total = 0.0;
    for (int i = 0; i < p.n_t(); ++i)
        total += scalar.at(i, j) * std::sqrt(p.node(i, j).metric(0, 0));
    return total * p.dt();
}

RandomFieldGen::RandomFieldGen(const BandSpec& band, uint64_t seed, int n_components)
    : period_(band.period), b0_(band.b0), b1_(band.b1), n_components_(n_components) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    modes_.resize(n_components);
    for (auto& comp : modes_) {
        comp.resize(5);
        for (int k = 0; k <= 4; ++k)
            for (int d = 0; d <= 6; ++d) {
                comp[k].cos_coef[d] = uni(rng);
                comp[k].sin_coef[d] = (k == 0) ? 0.0 : uni(rng);
            }
    }
}

double RandomFieldGen::eval(int component, double t, double s) const {
    const auto& comp = modes_.at(component);
    // s normalized to [-1, 1] keeps polynomial terms O(1)
    const double x = (2.0 * s + b0_ - b1_) / (b0_ + b1_);
    double value = 0.0;
    for (int k = 0; k <= 4; ++k) {
        const double ang = kTwoPi * k * t / period_;
        double pc = 0.0, ps = 0.0, xn = 1.0;
        for (int d = 0; d <= 6; ++d) {
            pc += comp[k].cos_coef[d] * xn;
            ps += comp[k].sin_coef[d] * xn;
            xn *= x;
        }
        value += pc * std::cos(ang) + ps * std::sin(ang);
    }
    return value;
}

TensorField RandomFieldGen::sample(const SurfacePatch& patch, int order) const {
    TensorField out(patch, order);
    if (out.comps() > n_components_)
        throw std::invalid_argument("RandomFieldGen: not enough components for this order");
    for (int j = 0; j <= patch.n_s(); ++j)
        for (int i = 0; i < patch.n_t(); ++i)
            for (int c = 0; c < out.comps(); ++c)
                out.at(i, j, c) = eval(c, patch.t_coord(i), patch.s_coord(j));
    return out;
}

double convergence_order(double coarse, double fine) {
    if (!(coarse > 0.0) || !(fine > 0.0)) return 0.0;
    return std::log2(coarse / fine);
}

bool ResidualReport::all_pass(double algebraic_tol, double min_order) const {
    for (const auto& r : results) {
        if (r.exact) continue;
        if (r.id.rfind("ptwise", 0) == 0) {
            if (r.residual_coarse > algebraic_tol || r.residual_fine > algebraic_tol) return false;
        } else if (r.order < min_order) {
            return false;
        }
    }
    return true;
}

namespace {

double max_norm(const TensorField& f) {
    double m = 0.0;
    for (double v : f.raw()) m = std::max(m, std::abs(v));
    return m;
}

// residuals of every identity on one patch, given the analytic random fields
std::vector<std::pair<std::string, double>> suite_residuals(const SurfacePatch& patch,
                                                            uint64_t seed) {
    const BandSpec& band = patch.spec();
    RandomFieldGen gen_u(band, seed * 6364136223846793005ULL + 1, 4);
    RandomFieldGen gen_w(band, seed * 6364136223846793005ULL + 2, 1);
    RandomFieldGen gen_r(band, seed * 6364136223846793005ULL + 3, 4);
    RandomFieldGen gen_vec(band, seed * 6364136223846793005ULL + 4, 2);
    RandomFieldGen gen_z(band, seed * 6364136223846793005ULL + 5, 1);
    RandomFieldGen gen_amb(band, seed * 6364136223846793005ULL + 6, 3);
    RandomFieldGen gen_x(band, seed * 6364136223846793005ULL + 7, 2);

    TensorField U = gen_u.sample(patch, 2);
    TensorField Usym = sym_part(U);
    TensorField w = gen_w.sample(patch, 0);
    TensorField R = gen_r.sample(patch, 2);
    TensorField W = gen_vec.sample(patch, 1);
    TensorField z = gen_z.sample(patch, 0);
    TensorField Q = q_field(patch);
    TensorField Pi = second_form_field(patch);
    TensorField Id = identity_field(patch);
    TensorField trPi = trace(Pi);
    TensorField kappa = scalar_field(patch, [&](double, double) { return 0.0; });
    for (int j = 0; j <= patch.n_s(); ++j)
        for (int i = 0; i < patch.n_t(); ++i) kappa.at(i, j) = patch.node(i, j).gauss_curv;

    std::vector<std::pair<std::string, double>> out;

    // algebraic identities, machine precision
    {
        TensorField lhs = add(compose(U, Q), compose(Q, transpose(U)));
        TensorField rhs = multiply_scalar(trace(U), Q);
        out.emplace_back("ptwise_UQ_plus_QUt", max_norm(add(lhs, rhs, 1.0, -1.0)));
    }
    {
        TensorField lhs = add(Usym, multiply_scalar(trace(Usym), Id), 1.0, -1.0);
        TensorField rhs = compose(compose(Q, Usym), Q);
        out.emplace_back("ptwise_U_minus_trU_id", max_norm(add(lhs, rhs, 1.0, -1.0)));
    }
    {
        TensorField lhs = compose(compose(Pi, Q), Pi);
        TensorField rhs = multiply_scalar(kappa, Q);
        out.emplace_back("ptwise_shape_Q_shape", max_norm(add(lhs, rhs, 1.0, -1.0)));
    }
    {
        TensorField qpi = compose(Q, Pi);
        TensorField lhs = add(qpi, transpose(qpi), 1.0, -1.0);
        TensorField rhs = multiply_scalar(trPi, Q);
        out.emplace_back("ptwise_Qshape_transpose", max_norm(add(lhs, rhs, 1.0, -1.0)));
    }

    // differential identities, expected order >= 2
    {
        // div(wR) = R^T Dw + w div R
        TensorField lhs = divergence(multiply_scalar(w, R));
        TensorField rhs = add(tensor_apply(R, covariant_derivative(w)),
                              multiply_scalar(w, divergence(R)));
        out.emplace_back("leibniz_div_scalar_tensor", max_norm(add(lhs, rhs, 1.0, -1.0)));
    }
    {
        // div(RW) = <R,DW> + <div R, W>, contraction on the first slot of R
        TensorField RW = tensor_apply(transpose(R), W);
        TensorField lhs = divergence(RW);
        TensorField rhs = add(inner(R, covariant_derivative(W)), inner(divergence(R), W));
        out.emplace_back("leibniz_div_tensor_vector", max_norm(add(lhs, rhs, 1.0, -1.0)));
    }
    {
        // the same statement on a symmetric field and a rotated vector
        TensorField P = sym_part(R);
        TensorField Z2 = q_rotate(W);
        TensorField lhs = divergence(tensor_apply(P, Z2));
        TensorField rhs = add(inner(P, covariant_derivative(Z2)), inner(divergence(P), Z2));
        out.emplace_back("leibniz_div_sym_tensor_vector", max_norm(add(lhs, rhs, 1.0, -1.0)));
    }
    {
        // div sym DZ = D div Z + kappa Z - 1/2 Q D div QZ
        TensorField Z = W;
        TensorField lhs = divergence(sym_part(covariant_derivative(Z)));
        TensorField rhs = add(covariant_derivative(divergence(Z)), multiply_scalar(kappa, Z));
        TensorField corr = q_rotate(covariant_derivative(divergence(q_rotate(Z))));
        rhs = add(rhs, corr, 1.0, -0.5);
        out.emplace_back("div_sym_grad_formula", max_norm(add(lhs, rhs, 1.0, -1.0)));
    }
    {
        // div Q Dz = 0
        out.emplace_back("div_QDz", max_norm(divergence(q_rotate(covariant_derivative(z)))));
    }
    {
        // div(z Id) = Dz
        TensorField lhs = divergence(multiply_scalar(z, Id));
        out.emplace_back("div_zId", max_norm(add(lhs, covariant_derivative(z), 1.0, -1.0)));
    }
    {
        // covariant derivative of the metric vanishes
        // (Dg)_{ijk} = d_k g_{ij} - Gamma^l_{ki} g_{lj} - Gamma^l_{kj} g_{il}
        TensorField g = Id;
        TensorField d_t(patch, 2), d_s(patch, 2);
        double m = 0.0;
        for (int c = 0; c < 4; ++c) {
            // partial derivatives via the public stencil by differentiating a scalar copy
            TensorField comp(patch, 0);
            for (int j = 0; j <= patch.n_s(); ++j)
                for (int i = 0; i < patch.n_t(); ++i) comp.at(i, j) = g.at(i, j, c);
            TensorField dcomp = covariant_derivative(comp);  // plain gradient for order 0
            int a = c / 2, b = c % 2;
            for (int j = 0; j <= patch.n_s(); ++j)
                for (int i = 0; i < patch.n_t(); ++i) {
                    const NodeGeometry& nd = patch.node(i, j);
                    for (int k = 0; k < 2; ++k) {
                        double v = dcomp.at(i, j, k);
                        for (int l = 0; l < 2; ++l)
                            v -= nd.christoffel[l][k][a] * g.at(i, j, 2 * l + b) +
                                 nd.christoffel[l][k][b] * g.at(i, j, 2 * a + l);
                        m = std::max(m, std::abs(v));
                    }
                }
        }
        out.emplace_back("metric_compatibility_Dg", m);
    }
    {
        // divergence theorem on a random vector field
        TensorField flux_lo(patch, 0), flux_hi(patch, 0);
        for (int i = 0; i < patch.n_t(); ++i) {
            auto nu0 = patch.boundary_conormal(i, 0);
            auto nu1 = patch.boundary_conormal(i, patch.n_s());
            // W covariant; <W, nu> = W_i nu^i
            flux_lo.at(i, 0) = W.vec(i, 0).dot(nu0);
            flux_hi.at(i, patch.n_s()) = W.vec(i, patch.n_s()).dot(nu1);
        }
        const double vol = integrate(divergence(W));
        const double flux = integrate_boundary(flux_lo, 0) + integrate_boundary(flux_hi, patch.n_s());
        out.emplace_back("divergence_theorem", std::abs(vol - flux));
    }
    {
        // integration by parts for the directional derivative of an ambient field:
        // int <X(y), Y> + int <y, (div X) Y + grad_X Y> = 0, Y vanishing at the s-ends
        TensorField X = gen_x.sample(patch, 1);
        TensorField Ybase = gen_vec.sample(patch, 1);
        const double half = 0.5 * (band.b0 + band.b1);
        const double norm = half * half * half * half;
        TensorField cut = scalar_field(patch, [&](double, double s) {
            double a = (s + band.b0), b = (band.b1 - s);
            return a * a * b * b / norm;
        });
        TensorField Y = multiply_scalar(cut, Ybase);

        // ambient components of y and of Y
        std::vector<TensorField> y_amb, Y_amb;
        for (int c = 0; c < 3; ++c) {
            y_amb.emplace_back(patch, 0);
            Y_amb.emplace_back(patch, 0);
        }
        for (int j = 0; j <= patch.n_s(); ++j)
            for (int i = 0; i < patch.n_t(); ++i) {
                const NodeGeometry& nd = patch.node(i, j);
                Eigen::Vector2d Yup = nd.metric_inv * Y.vec(i, j);
                Vec3 Yv = Yup(0) * nd.e1 + Yup(1) * nd.e2;
                for (int c = 0; c < 3; ++c) {
                    y_amb[c].at(i, j) = gen_amb.eval(c, patch.t_coord(i), patch.s_coord(j));
                    Y_amb[c].at(i, j) = Yv(c);
                }
            }
        TensorField divX = divergence(X);
        TensorField integrand(patch, 0);
        // gradients of each ambient component
        std::vector<TensorField> dy, dY;
        for (int c = 0; c < 3; ++c) {
            dy.push_back(covariant_derivative(y_amb[c]));
            dY.push_back(covariant_derivative(Y_amb[c]));
        }
        for (int j = 0; j <= patch.n_s(); ++j)
            for (int i = 0; i < patch.n_t(); ++i) {
                const NodeGeometry& nd = patch.node(i, j);
                Eigen::Vector2d Xup = nd.metric_inv * X.vec(i, j);
                double v = 0.0;
                for (int c = 0; c < 3; ++c) {
                    double Xy = Xup.dot(dy[c].vec(i, j));   // X(y_c), plain derivative
                    double XY = Xup.dot(dY[c].vec(i, j));   // X(Y_c)
                    v += Xy * Y_amb[c].at(i, j) +
                         y_amb[c].at(i, j) * (divX.at(i, j) * Y_amb[c].at(i, j) + XY);
                }
                integrand.at(i, j) = v;
            }
        out.emplace_back("directional_derivative_ibp", std::abs(integrate(integrand)));
    }
    return out;
}

}  // namespace

ResidualReport identity_suite(const BandSpec& spec, uint64_t seed) {
    BandSpec fine = spec;
    fine.n_t = spec.n_t * 2;
    fine.n_s = spec.n_s * 2;
    SurfacePatch coarse_patch = build_patch(spec);
    SurfacePatch fine_patch = build_patch(fine);
    auto rc = suite_residuals(coarse_patch, seed);
    auto rf = suite_residuals(fine_patch, seed);

    ResidualReport rep;
    rep.grid_coarse = spec.n_s;
    rep.grid_fine = fine.n_s;
    for (size_t k = 0; k < rc.size(); ++k) {
        IdentityResult r;
        r.id = rc[k].first;
        r.residual_coarse = rc[k].second;
        r.residual_fine = rf[k].second;
        r.exact = r.residual_coarse <= 1e-12 && r.residual_fine <= 1e-12;
        r.order = r.exact ? std::numeric_limits<double>::infinity()
                          : convergence_order(r.residual_coarse, r.residual_fine);
        rep.results.push_back(r);
    }
    return rep;
}

}  // namespace shellkorn
