#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shellkorn/strain.hpp"

using namespace shellkorn;

namespace {

BandSpec spec_of(Preset p, int n) {
    BandSpec spec;
    spec.preset = p;
    spec.n_t = n;
    spec.n_s = n;
    return spec;
}

double max_abs(const TensorField& f) {
    double m = 0.0;
    for (double v : f.raw()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("rigid motions have vanishing strain up to truncation error") {
    const Vec3 c(0.3, -1.1, 0.7);
    const Vec3 axis(0.2, 0.5, -0.4);
    auto rigid = [&](const SurfacePatch& p) {
        return Displacement(p, [&](double t, double s) {
            const Vec3 x = p.map().position(t, s);
            return Vec3(c + axis.cross(x));
        });
    };
    SurfacePatch coarse = build_patch(spec_of(Preset::MixedInflection, 32));
    SurfacePatch fine = build_patch(spec_of(Preset::MixedInflection, 64));
    const double rc = max_abs(strain(rigid(coarse)));
    const double rf = max_abs(strain(rigid(fine)));
    CHECK(rc < 5e-2);
    CHECK(rf < rc / 3.5);  // second-order decay
}

TEST_CASE("pure normal displacement has strain equal to the second fundamental form") {
    SurfacePatch patch = build_patch(spec_of(Preset::TorusInner, 16));
    Displacement y(patch, [&](double t, double s) { return patch.map().unit_normal(t, s); });
    // W = 0 identically, so sym DW = 0 exactly and strain = w Pi with w = 1
    CHECK(max_abs(y.tangential()) < 1e-14);
    TensorField U = strain(y);
    for (int j = 0; j <= patch.n_s(); j += 3)
        for (int i = 0; i < patch.n_t(); i += 3)
            CHECK((U.mat(i, j) - patch.node(i, j).second_form).norm() < 1e-12);
}

TEST_CASE("strain and auxiliary fields are homogeneous of degree one") {
    SurfacePatch patch = build_patch(spec_of(Preset::MixedInflection, 16));
    auto f = random_displacement(patch.spec(), 11, false);
    Displacement y1(patch, f);
    Displacement y2(patch, [&](double t, double s) { return Vec3(2.0 * f(t, s)); });
    TensorField u1 = strain(y1), u2 = strain(y2);
    CHECK(max_abs(add(u2, scale(u1, 2.0), 1.0, -1.0)) < 1e-12 * (1.0 + max_abs(u1)));
    AuxFields a1 = aux_fields(y1), a2 = aux_fields(y2);
    CHECK(max_abs(add(a2.V, scale(a1.V, 2.0), 1.0, -1.0)) < 1e-12 * (1.0 + max_abs(a1.V)));
}

TEST_CASE("the algebraic rows of the first-order systems vanish identically") {
    SurfacePatch patch = build_patch(spec_of(Preset::MixedInflection, 32));
    Displacement y(patch, random_displacement(patch.spec(), 4, false));
    StrainSystemResiduals res = strain_system_residuals(y);
    // the first system's rows are satisfied by the construction of v and V
    CHECK(res.gradient_row < 1e-10);
    CHECK(res.trace_row < 1e-10);
    CHECK(res.aux_gradient_row > 0.0);  // substantive rows carry discretization error
    CHECK(res.aux_divergence_row > 0.0);
}

TEST_CASE("the substantive residual rows converge at second order") {
    auto residuals = [](int n) {
        SurfacePatch patch = build_patch(spec_of(Preset::MixedInflection, n));
        Displacement y(patch, random_displacement(patch.spec(), 9, false));
        return strain_system_residuals(y);
    };
    StrainSystemResiduals rc = residuals(48), rf = residuals(96);
    CHECK(std::log2(rc.aux_gradient_row / rf.aux_gradient_row) > 1.8);
    CHECK(std::log2(rc.aux_divergence_row / rf.aux_divergence_row) > 1.8);
}

TEST_CASE("dual norm of a constant equals the constant times the root area") {
    // (-Laplace + 1) u = c is solved exactly by u = c: the dual norm reduces
    // to the L2 norm of the constant
    SurfacePatch patch = build_patch(spec_of(Preset::Cylinder, 24));
    TensorField c(patch, 0);
    for (double& v : c.raw()) v = 3.0;
    const double area = 2.0 * 3.14159265358979323846;  // radius 1, length 1
    CHECK(dual_norm(patch, c) == doctest::Approx(3.0 * std::sqrt(area)).epsilon(1e-4));
}

TEST_CASE("dual norm never exceeds the L2 norm") {
    SurfacePatch patch = build_patch(spec_of(Preset::MixedInflection, 24));
    RandomFieldGen gen(patch.spec(), 17, 1);
    TensorField f = gen.sample(patch, 0);
    CHECK(dual_norm(patch, f) <= l2_norm(f) * (1.0 + 1e-8));
}

TEST_CASE("clamped displacements vanish on both edges exactly") {
    SurfacePatch patch = build_patch(spec_of(Preset::MixedInflection, 16));
    Displacement y(patch, random_displacement(patch.spec(), 2, true), ClampSet::BothEdges);
    for (int i = 0; i < patch.n_t(); ++i) {
        CHECK(y.ambient(i, 0).norm() == 0.0);
        CHECK(y.ambient(i, patch.n_s()).norm() == 0.0);
    }
}

TEST_CASE("inequality monitors behave on degenerate inputs") {
    SurfacePatch patch = build_patch(spec_of(Preset::MixedInflection, 16));
    Displacement zero(patch, [](double, double) { return Vec3::Zero(); }, ClampSet::BothEdges);
    // 0/0: not a ratio, reported as NaN
    CHECK(std::isnan(normal_bound_ratio(zero)));
    CHECK_THROWS_AS(displacement_bound_ratio(zero), std::runtime_error);
    Displacement unclamped(patch, random_displacement(patch.spec(), 3, false));
    CHECK_THROWS_AS(normal_bound_ratio(unclamped), std::invalid_argument);
}

TEST_CASE("monitors stay bounded on rigid motions") {
    // zero-strain fields: the first monitor's denominator comes from the
    // boundary trace alone and the ratio stays finite
    SurfacePatch patch = build_patch(spec_of(Preset::MixedInflection, 32));
    Displacement y(patch, [&](double t, double s) {
        const Vec3 x = patch.map().position(t, s);
        return Vec3(Vec3(0.1, 0.2, -0.3) + Vec3(0.0, 0.0, 1.0).cross(x));
    });
    const double ratio = displacement_bound_ratio(y);
    CHECK(std::isfinite(ratio));
    CHECK(ratio > 0.0);
}
