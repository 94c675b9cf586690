#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

// Parametric surface bands alpha(t,s), t-periodic, with all pointwise
// geometric data (metric, second fundamental form, shape operator, Gaussian
// curvature, tangent-plane rotation Q) cached on a uniform grid.

namespace shellkorn {

using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

enum class Preset {
    MixedInflection,   // surface of revolution, r(z) = 1 + z^3/3, z = -s
    TorusOuter,        // torus band around the outer equator (elliptic)
    TorusInner,        // torus band around the inner equator (hyperbolic)
    Cylinder,          // constant radius (parabolic)
    CustomRevolution,  // polynomial profile r(z), z = -s
};

std::string preset_name(Preset p);
Preset preset_from_name(const std::string& name);

struct BandSpec {
    Preset preset = Preset::MixedInflection;
    double b0 = 0.5;           // band extends over s in [-b0, b1]
    double b1 = 0.5;
    double period = 2.0 * 3.14159265358979323846;  // t-period a
    int n_t = 64;              // grid cells in t (nodes: n_t, periodic)
    int n_s = 64;              // grid cells in s (nodes: n_s + 1)

    // torus parameters
    double torus_major = 2.0;  // R
    double torus_minor = 1.0;  // rho
    double torus_phi0 = std::numeric_limits<double>::quiet_NaN();  // band center angle; NaN = preset default

    // cylinder / custom revolution
    double cylinder_radius = 1.0;
    std::vector<double> profile_coeffs;  // r(z) = sum_k c_k z^k (custom_revolution)

    // Throws std::invalid_argument on violation.
    void validate() const;
};

// First and second derivatives of the parametric map at one point.
struct SurfaceJet {
    Vec3 position;
    Vec3 d_t, d_s;
    Vec3 d_tt, d_ts, d_ss;
};

// Analytic map alpha(t,s) for one preset; closed-form derivatives.
class SurfaceMap {
  public:
    explicit SurfaceMap(const BandSpec& spec);
    SurfaceJet jet(double t, double s) const;
    Vec3 position(double t, double s) const { return jet(t, s).position; }
    Vec3 unit_normal(double t, double s) const;
    const BandSpec& spec() const { return spec_; }

  private:
    BandSpec spec_;
    double theta_rate_ = 0.0;  // d(theta)/dt, sign fixes the normal orientation
    double phi0_ = 0.0;        // torus band center

    void profile(double z, double& r, double& dr, double& ddr) const;
};

// Per-node cache. Tensor components are coordinate components; index 0 is t,
// index 1 is s. second_form and q_form are covariant (lower indices);
// shape_op is the (1,1) Weingarten map g^{-1} Pi.
struct NodeGeometry {
    Vec3 position;
    Vec3 e1, e2;      // alpha_t, alpha_s
    Vec3 normal;      // unit, (e1, e2, n) positively oriented
    Mat2 metric;
    Mat2 metric_inv;
    double sqrt_det_g = 0.0;
    double christoffel[2][2][2];  // Gamma^k_{ij}, symmetric in i,j
    Mat2 second_form;             // Pi_{ij} = <d_i n, e_j> = -<n, d_ij alpha>
    Mat2 shape_op;                // g^{-1} Pi
    Mat2 q_form;                  // Q_{ij} = sqrt(g) eps_{ij}
    double gauss_curv = 0.0;      // kappa = det(shape_op)
    double mean_trace = 0.0;      // rho = tr Pi = g^{ij} Pi_{ij}
};

class SurfacePatch {
  public:
    SurfacePatch(const BandSpec& spec, std::shared_ptr<const SurfaceMap> map,
                 std::vector<NodeGeometry> nodes);

    const BandSpec& spec() const { return spec_; }
    const SurfaceMap& map() const { return *map_; }

    int n_t() const { return spec_.n_t; }
    int n_s() const { return spec_.n_s; }
    double dt() const { return dt_; }
    double ds() const { return ds_; }
    double t_coord(int i) const { return i * dt_; }
    double s_coord(int j) const { return -spec_.b0 + j * ds_; }

    // i in [0, n_t), j in [0, n_s]; i wraps periodically.
    const NodeGeometry& node(int i, int j) const;
    int node_index(int i, int j) const;
    int num_nodes() const { return spec_.n_t * (spec_.n_s + 1); }

    // Outward unit conormal (tangent, coordinate components, contravariant)
    // along the boundary circle at j = 0 or j = n_s.
    Eigen::Vector2d boundary_conormal(int i, int j) const;
    // Unit tangent along the boundary circle (contravariant components).
    Eigen::Vector2d boundary_tangent(int i, int j) const;

    double max_principal_curvature() const;

  private:
    BandSpec spec_;
    std::shared_ptr<const SurfaceMap> map_;
    std::vector<NodeGeometry> nodes_;
    double dt_, ds_;
};

SurfacePatch build_patch(const BandSpec& spec);

// Q applied to a tangent vector given in contravariant coordinate components.
Eigen::Vector2d q_apply(const SurfacePatch& patch, int i, int j,
                        const Eigen::Vector2d& v);

struct ValidationCondition {
    std::string id;
    bool pass = false;
    int witness_i = -1;  // worst node when failing (or extremal when passing)
    int witness_j = -1;
    double value = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCondition> conditions;
    bool all_pass() const;
    bool mixed_type() const;  // conditions (i)-(iii)
};

// Checks the mixed-type curvature conditions and the positive parallel
// normal-curvature condition on the kappa <= 0 side. delta = one grid cell.
ValidationReport validate_curvature_assumptions(const SurfacePatch& patch);

}  // namespace shellkorn
