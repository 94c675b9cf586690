#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shellkorn/geometry.hpp"
#include "shellkorn/tensorfield.hpp"

// Discrete covariant tensor calculus on a SurfacePatch. Partial derivatives
// are second order: central stencils in the interior, periodic wrap in t,
// one-sided three-point stencils at the s-boundaries.

namespace shellkorn {

// ---- derivatives -----------------------------------------------------------

// Levi-Civita covariant derivative; raises the order by one. The derivative
// index is the LAST slot: (DW)_{ij} = D_j W_i. Order-2 input is unsupported.
TensorField covariant_derivative(const TensorField& f);

// Metric trace of D over the last two slots: div W = g^{ij} D_j W_i,
// (div U)_i = g^{jk} D_k U_{ij}.
TensorField divergence(const TensorField& f);

// ---- pointwise algebra (exact, no discretization error) -------------------

TensorField add(const TensorField& a, const TensorField& b, double ca = 1.0, double cb = 1.0);
TensorField scale(const TensorField& a, double c);
TensorField multiply_scalar(const TensorField& scalar, const TensorField& f);
TensorField trace(const TensorField& u);                // order 2 -> 0
TensorField transpose(const TensorField& u);            // order 2 -> 2
TensorField sym_part(const TensorField& u);             // order 2 -> 2
// Composition through the metric: (AB)_{ij} = A_{ik} g^{kl} B_{lj}.
TensorField compose(const TensorField& a, const TensorField& b);
// 2-tensor applied to a vector, contracting the second slot through g:
// (A W)_i = A_{ik} g^{kl} W_l. Used for the shape operator and Q.
TensorField tensor_apply(const TensorField& a, const TensorField& w);
// Full metric contraction <A,B> (orders must match): order-0 result.
TensorField inner(const TensorField& a, const TensorField& b);
// identity 2-tensor (components g_{ij})
TensorField identity_field(const SurfacePatch& patch);
// cached geometric fields as TensorFields
TensorField q_field(const SurfacePatch& patch);          // Q_{ij}
TensorField second_form_field(const SurfacePatch& patch);  // Pi_{ij}
TensorField scalar_field(const SurfacePatch& patch, const std::function<double(double, double)>& f);

// Q applied to every node of an order-1 field.
TensorField q_rotate(const TensorField& w);

// ---- quadrature ------------------------------------------------------------

// Integral over S of an order-0 field against the area form (trapezoid in t,
// composite Simpson in s).
double integrate(const TensorField& scalar);
// Integral of <a,b> over S.
double l2_inner(const TensorField& a, const TensorField& b);
double l2_norm(const TensorField& a);
// Boundary integral of an order-0 field over one boundary circle (j = 0 or n_s).
double integrate_boundary(const TensorField& scalar, int j);

// ---- random smooth fields ---------------------------------------------------

// Band-limited Fourier modes |k| <= 4 in t times polynomials of degree <= 6
// in s, coefficients ~ U(-1, 1). Resolution independent: the same seed gives
// the same analytic field on any grid over the same band.
class RandomFieldGen {
  public:
    RandomFieldGen(const BandSpec& band, uint64_t seed, int n_components = 1);
    double eval(int component, double t, double s) const;
    TensorField sample(const SurfacePatch& patch, int order) const;

  private:
    double period_;
    double b0_, b1_;
    int n_components_;
    struct Mode { double cos_coef[7]; double sin_coef[7]; };  // per poly degree
    std::vector<std::vector<Mode>> modes_;  // [component][k], k = 0..4
};

// ---- identity suite ----------------------------------------------------------

struct IdentityResult {
    std::string id;
    double residual_coarse = 0.0;
    double residual_fine = 0.0;
    double order = 0.0;   // log2(coarse/fine); meaningless when exact
    bool exact = false;   // both residuals at machine precision
};

struct ResidualReport {
    int grid_coarse = 0;
    int grid_fine = 0;
    std::vector<IdentityResult> results;
    bool all_pass(double algebraic_tol = 1e-12, double min_order = 1.9) const;
};

// Max-norm residuals of the covariant-calculus identities on random smooth
// fields, at the patch resolution and at double resolution.
ResidualReport identity_suite(const BandSpec& spec, uint64_t seed);

// order estimate helper
double convergence_order(double coarse, double fine);

}  // namespace shellkorn
