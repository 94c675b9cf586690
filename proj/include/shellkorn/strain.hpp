#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "shellkorn/geometry.hpp"
#include "shellkorn/tensorcalc.hpp"
#include "shellkorn/tensorfield.hpp"

// Displacements y = W + w n of the middle surface, the strain tensor
// sym DW + w Pi, the auxiliary fields (v, V), and the discrete monitors for
// the two rigidity estimates.

namespace shellkorn {

enum class ClampSet { None, BothEdges };

// Ambient displacement sampled at grid nodes together with its
// tangential/normal split.
class Displacement {
  public:
    Displacement(const SurfacePatch& patch, const std::function<Vec3(double, double)>& y,
                 ClampSet clamp = ClampSet::None);

    const SurfacePatch& patch() const { return *patch_; }
    Vec3 ambient(int i, int j) const;
    const TensorField& tangential() const { return tangential_; }  // W, covariant
    const TensorField& normal_part() const { return normal_; }     // w
    ClampSet clamp() const { return clamp_; }

  private:
    const SurfacePatch* patch_;
    std::vector<Vec3> y_;
    TensorField tangential_;
    TensorField normal_;
    ClampSet clamp_;
};

struct AuxFields {
    TensorField v;  // scalar, 1/2 div QW
    TensorField V;  // order 1, Q(Dw - shape(W))
};

// Upsilon(y) = sym DW + w Pi; exactly symmetric.
TensorField strain(const Displacement& y);

AuxFields aux_fields(const Displacement& y);

// Max-norm residuals of the two first-order systems that the pair (w, W) and
// the auxiliary pair (v, V) satisfy, with the strain as right-hand side.
struct StrainSystemResiduals {
    double gradient_row = 0.0;        // Dw - shape(W) + QV          (algebraic, ~0)
    double trace_row = 0.0;           // div W + (tr Pi) w - tr U    (algebraic, ~0)
    double aux_gradient_row = 0.0;    // Dv - shape(V) - Q div(QUQ)
    double aux_divergence_row = 0.0;  // div V + (tr Pi) v + <Q shape, U>
};

StrainSystemResiduals strain_system_residuals(const Displacement& y);

// Dual [W^{1,2}]' norm of a scalar field: sqrt(<f, u>_{L2}) with
// (-Laplace_g + 1) u = f, natural boundary conditions; bilinear elements on
// the parameter grid with the surface measure.
double dual_norm(const SurfacePatch& patch, const TensorField& f);

// Ratio (|W|^2 + dual-norm(w)^2) / (|strain|^2 + boundary trace of |W|^2):
// the quantity bounded by the rigidity estimate for general displacements.
// Throws on a degenerate (zero-denominator) sample.
double displacement_bound_ratio(const Displacement& y);

// Ratio |w|^2 / (|Dw| |strain| + |strain|^2) for displacements clamped at
// both edges. Returns NaN for the degenerate 0/0 sample (vanishing strain
// and vanishing w); throws if the denominator alone vanishes.
double normal_bound_ratio(const Displacement& y);

// Random smooth ambient displacement (three seeded Fourier x polynomial
// component fields); when clamped, multiplied by the cutoff
// (s+b0)^2 (b1-s)^2 / ((b0+b1)/2)^4 so y vanishes at both edges.
std::function<Vec3(double, double)> random_displacement(const BandSpec& band, uint64_t seed,
                                                        bool clamped);

}  // namespace shellkorn
