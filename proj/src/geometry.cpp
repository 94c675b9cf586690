#include "shellkorn/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace shellkorn {

std::string preset_name(Preset p) {
    switch (p) {
        case Preset::MixedInflection: return "mixed_inflection";
        case Preset::TorusOuter: return "torus_outer";
        case Preset::TorusInner: return "torus_inner";
        case Preset::Cylinder: return "cylinder";
        case Preset::CustomRevolution: return "custom_revolution";
    }
    throw std::logic_error("unknown preset");
}

Preset preset_from_name(const std::string& name) {
    if (name == "mixed_inflection") return Preset::MixedInflection;
    if (name == "torus_outer") return Preset::TorusOuter;
    if (name == "torus_inner") return Preset::TorusInner;
    if (name == "cylinder") return Preset::Cylinder;
    if (name == "custom_revolution") return Preset::CustomRevolution;
    throw std::invalid_argument("unknown preset: " + name);
}

void BandSpec::validate() const {
    if (!(b0 > 0.0) || !(b1 > 0.0)) throw std::invalid_argument("band limits b0, b1 must be positive");
    if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
    if (n_t < 8 || n_t % 2 != 0) throw std::invalid_argument("n_t must be even and >= 8");
    if (n_s < 8) throw std::invalid_argument("grid too coarse: n_s must be >= 8");
    if (n_s % 2 != 0) throw std::invalid_argument("n_s must be even (composite Simpson quadrature)");
    if (preset == Preset::TorusOuter || preset == Preset::TorusInner) {
        if (!(torus_major > torus_minor) || !(torus_minor > 0.0))
            throw std::invalid_argument("torus requires 0 < minor radius < major radius");
        if (!(b0 + b1 < torus_minor * 2.0 * 3.14159265358979323846))
            throw std::invalid_argument("torus band wider than the minor circle");
    }
    if (preset == Preset::Cylinder && !(cylinder_radius > 0.0))
        throw std::invalid_argument("non-positive profile radius");
    if (preset == Preset::CustomRevolution) {
        if (profile_coeffs.empty())
            throw std::invalid_argument("custom_revolution needs profile coefficients");
        // r(z) > 0 sampled over the band
        for (int k = 0; k <= 256; ++k) {
            double s = -b0 + k * (b0 + b1) / 256.0;
            double z = -s, r = 0.0, p = 1.0;
            for (double c : profile_coeffs) { r += c * p; p *= z; }
            if (!(r > 0.0)) throw std::invalid_argument("non-positive profile radius over the band");
        }
    }
}

SurfaceMap::SurfaceMap(const BandSpec& spec) : spec_(spec) {
    spec_.validate();
    const double two_pi = 2.0 * 3.14159265358979323846;
    switch (spec_.preset) {
        case Preset::MixedInflection:
        case Preset::Cylinder:
        case Preset::CustomRevolution:
            // Clockwise t so that (alpha_t, alpha_s, n) with n the positively
            // oriented normal gives Pi(alpha_t, alpha_t) > 0 on the whole band.
            theta_rate_ = -two_pi / spec_.period;
            break;
        case Preset::TorusOuter:
            theta_rate_ = two_pi / spec_.period;
            phi0_ = std::isnan(spec_.torus_phi0) ? 0.0 : spec_.torus_phi0;
            break;
        case Preset::TorusInner:
            theta_rate_ = -two_pi / spec_.period;
            phi0_ = std::isnan(spec_.torus_phi0) ? 3.14159265358979323846 : spec_.torus_phi0;
            break;
    }
}

void SurfaceMap::profile(double z, double& r, double& dr, double& ddr) const {
    switch (spec_.preset) {
        case Preset::MixedInflection:
            r = 1.0 + z * z * z / 3.0;
            dr = z * z;
            ddr = 2.0 * z;
            return;
        case Preset::Cylinder:
            r = spec_.cylinder_radius;
            dr = 0.0;
            ddr = 0.0;
            return;
        case Preset::CustomRevolution: {
            r = dr = ddr = 0.0;
            const auto& c = spec_.profile_coeffs;
            for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
                ddr = ddr * z + 2.0 * dr;
                // dr update must precede r; Horner on (r, r', r'')
                dr = dr * z + r;
                r = r * z + c[k];
            }
            // Horner above accumulates r' and r'' without factorials already
            return;
        }
        default:
            throw std::logic_error("profile() called for a torus preset");
    }
}

SurfaceJet SurfaceMap::jet(double t, double s) const {
    SurfaceJet out;
    const double th = theta_rate_ * t;
    const double c = std::cos(th), sn = std::sin(th);
    const double w = theta_rate_;
    if (spec_.preset == Preset::TorusOuter || spec_.preset == Preset::TorusInner) {
        const double R = spec_.torus_major, rho = spec_.torus_minor;
        const double phi = phi0_ + s / rho;
        const double cp = std::cos(phi), sp = std::sin(phi);
        const double r = R + rho * cp;           // distance from the axis
        const double dphi = 1.0 / rho;           // dphi/ds
        out.position = Vec3(r * c, r * sn, rho * sp);
        out.d_t = w * r * Vec3(-sn, c, 0.0);
        out.d_s = Vec3(-rho * sp * dphi * c, -rho * sp * dphi * sn, rho * cp * dphi);
        out.d_tt = -w * w * r * Vec3(c, sn, 0.0);
        out.d_ts = w * (-rho * sp * dphi) * Vec3(-sn, c, 0.0);
        out.d_ss = Vec3(-rho * cp * dphi * dphi * c, -rho * cp * dphi * dphi * sn,
                        -rho * sp * dphi * dphi);
        return out;
    }
    // surface of revolution over a profile graph, z = -s
    const double z = -s;
    double r, dr, ddr;
    profile(z, r, dr, ddr);
    out.position = Vec3(r * c, r * sn, z);
    out.d_t = w * r * Vec3(-sn, c, 0.0);
    out.d_s = Vec3(-dr * c, -dr * sn, -1.0);      // d/ds = -d/dz
    out.d_tt = -w * w * r * Vec3(c, sn, 0.0);
    out.d_ts = -w * dr * Vec3(-sn, c, 0.0);
    out.d_ss = Vec3(ddr * c, ddr * sn, 0.0);
    return out;
}

Vec3 SurfaceMap::unit_normal(double t, double s) const {
    SurfaceJet j = jet(t, s);
    Vec3 n = j.d_t.cross(j.d_s);
    return n / n.norm();
}

namespace {

NodeGeometry make_node(const SurfaceMap& map, double t, double s) {
    NodeGeometry nd;
    SurfaceJet j = map.jet(t, s);
    nd.position = j.position;
    nd.e1 = j.d_t;
    nd.e2 = j.d_s;
    Vec3 cr = j.d_t.cross(j.d_s);
    const double area = cr.norm();
    if (!(area > 0.0)) throw std::runtime_error("degenerate parametrization (|a_t x a_s| = 0)");
    nd.normal = cr / area;

    nd.metric << j.d_t.dot(j.d_t), j.d_t.dot(j.d_s), j.d_s.dot(j.d_t), j.d_s.dot(j.d_s);
    const double det = nd.metric.determinant();
    if (!(det > 0.0)) throw std::runtime_error("metric not SPD");
    nd.metric_inv = nd.metric.inverse();
    nd.sqrt_det_g = std::sqrt(det);

    // dg_{ij}/dx^k from the second derivatives of alpha
    const Vec3 d1[2] = {j.d_t, j.d_s};
    const Vec3 d2[2][2] = {{j.d_tt, j.d_ts}, {j.d_ts, j.d_ss}};
    double dg[2][2][2];  // dg[k][i][j] = d_k g_{ij}
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int jj = 0; jj < 2; ++jj)
                dg[k][i][jj] = d2[i][k].dot(d1[jj]) + d1[i].dot(d2[jj][k]);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int jj = 0; jj < 2; ++jj) {
                double sum = 0.0;
                for (int l = 0; l < 2; ++l)
                    sum += nd.metric_inv(k, l) * (dg[i][jj][l] + dg[jj][i][l] - dg[l][i][jj]);
                nd.christoffel[k][i][jj] = 0.5 * sum;
            }

    // Pi_{ij} = <d_i n, e_j> = -<n, d_ij alpha>
    for (int i = 0; i < 2; ++i)
        for (int jj = 0; jj < 2; ++jj)
            nd.second_form(i, jj) = -nd.normal.dot(d2[i][jj]);
    nd.shape_op = nd.metric_inv * nd.second_form;
    nd.gauss_curv = nd.shape_op.determinant();
    nd.mean_trace = nd.shape_op.trace();

    nd.q_form << 0.0, nd.sqrt_det_g, -nd.sqrt_det_g, 0.0;
    return nd;
}

}  // namespace

SurfacePatch::SurfacePatch(const BandSpec& spec, std::shared_ptr<const SurfaceMap> map,
                           std::vector<NodeGeometry> nodes)
    : spec_(spec), map_(std::move(map)), nodes_(std::move(nodes)) {
    dt_ = spec_.period / spec_.n_t;
    ds_ = (spec_.b0 + spec_.b1) / spec_.n_s;
}

int SurfacePatch::node_index(int i, int j) const {
    i %= spec_.n_t;
    if (i < 0) i += spec_.n_t;
    return j * spec_.n_t + i;
}

const NodeGeometry& SurfacePatch::node(int i, int j) const {
    return nodes_[node_index(i, j)];
}

Eigen::Vector2d SurfacePatch::boundary_conormal(int i, int j) const {
    // +s direction at j = n_s, -s at j = 0, g-normalized, made g-orthogonal
    // to the boundary tangent direction alpha_t.
    const NodeGeometry& nd = node(i, j);
    Eigen::Vector2d es(0.0, j == 0 ? -1.0 : 1.0);
    Eigen::Vector2d et(1.0, 0.0);
    const double proj = (et.transpose() * nd.metric * es)(0) / (et.transpose() * nd.metric * et)(0);
    Eigen::Vector2d nu = es - proj * et;
    const double len = std::sqrt((nu.transpose() * nd.metric * nu)(0));
    return nu / len;
}

Eigen::Vector2d SurfacePatch::boundary_tangent(int i, int j) const {
    const NodeGeometry& nd = node(i, j);
    Eigen::Vector2d et(1.0, 0.0);
    return et / std::sqrt(nd.metric(0, 0));
}

double SurfacePatch::max_principal_curvature() const {
    double m = 0.0;
    for (const auto& nd : nodes_) {
        Eigen::EigenSolver<Mat2> es(nd.shape_op, false);
        m = std::max(m, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return m;
}

SurfacePatch build_patch(const BandSpec& spec) {
    auto map = std::make_shared<SurfaceMap>(spec);
    const BandSpec& sp = map->spec();
    std::vector<NodeGeometry> nodes(static_cast<size_t>(sp.n_t) * (sp.n_s + 1));
    const double dt = sp.period / sp.n_t;
    const double ds = (sp.b0 + sp.b1) / sp.n_s;
    for (int j = 0; j <= sp.n_s; ++j)
        for (int i = 0; i < sp.n_t; ++i)
            nodes[static_cast<size_t>(j) * sp.n_t + i] =
                make_node(*map, i * dt, -sp.b0 + j * ds);
    return SurfacePatch(sp, std::move(map), std::move(nodes));
}

Eigen::Vector2d q_apply(const SurfacePatch& patch, int i, int j, const Eigen::Vector2d& v) {
    if (j < 0 || j > patch.n_s() || i < 0 || i >= patch.n_t())
        throw std::out_of_range("q_apply: node out of range");
    const NodeGeometry& nd = patch.node(i, j);
    return nd.metric_inv * (nd.q_form * v);
}

bool ValidationReport::all_pass() const {
    for (const auto& c : conditions)
        if (!c.pass) return false;
    return true;
}

bool ValidationReport::mixed_type() const {
    for (const auto& c : conditions)
        if (!c.pass && (c.id == "kappa_positive_side" || c.id == "kappa_negative_side" ||
                        c.id == "kappa_transversal_zero"))
            return false;
    return true;
}

ValidationReport validate_curvature_assumptions(const SurfacePatch& patch) {
    constexpr double kappa_min = 1e-6;
    constexpr double c_min = 1e-6;
    const int n_t = patch.n_t(), n_s = patch.n_s();
    const double ds = patch.ds();
    const double delta = ds;  // one grid cell

    ValidationReport rep;
    auto scan = [&](const std::string& id, auto in_region, auto value, double threshold,
                    bool want_min_above) {
        ValidationCondition cond;
        cond.id = id;
        bool any = false;
        double extremal = 0.0;
        for (int j = 0; j <= n_s; ++j) {
            if (!in_region(patch.s_coord(j))) continue;
            for (int i = 0; i < n_t; ++i) {
                double v = value(i, j);
                if (!any || (want_min_above ? v < extremal : v > extremal)) {
                    extremal = v;
                    cond.witness_i = i;
                    cond.witness_j = j;
                    any = true;
                }
            }
        }
        cond.value = extremal;
        cond.pass = any && (want_min_above ? extremal > threshold : extremal <= threshold);
        if (!any) {
            cond.pass = false;
            cond.detail = "region empty at this resolution";
        }
        rep.conditions.push_back(cond);
    };

    // (i) kappa > kappa_min on s > delta (includes the s = b1 edge)
    scan("kappa_positive_side", [&](double s) { return s > delta; },
         [&](int i, int j) { return patch.node(i, j).gauss_curv; }, kappa_min, true);
    // (ii) kappa < -kappa_min on s < -delta
    scan("kappa_negative_side", [&](double s) { return s < -delta; },
         [&](int i, int j) { return -patch.node(i, j).gauss_curv; }, kappa_min, true);
    // (iii) |d kappa / ds| >= c on |s| <= delta (and kappa itself small there)
    {
        ValidationCondition cond;
        cond.id = "kappa_transversal_zero";
        double min_slope = std::numeric_limits<double>::infinity();
        double max_abs_kappa = 0.0;
        bool any = false;
        for (int j = 1; j < n_s; ++j) {
            if (std::abs(patch.s_coord(j)) > delta) continue;
            for (int i = 0; i < n_t; ++i) {
                any = true;
                const double k = patch.node(i, j).gauss_curv;
                const double slope = std::abs(
                    (patch.node(i, j + 1).gauss_curv - patch.node(i, j - 1).gauss_curv) /
                    (2.0 * ds));
                if (slope < min_slope) {
                    min_slope = slope;
                    cond.witness_i = i;
                    cond.witness_j = j;
                }
                max_abs_kappa = std::max(max_abs_kappa, std::abs(k));
            }
        }
        cond.value = any ? min_slope : 0.0;
        // |kappa| <= C*delta with C tied to the observed slope scale
        cond.pass = any && min_slope >= c_min && max_abs_kappa <= 10.0 * min_slope * delta + kappa_min;
        if (!any) cond.detail = "no nodes with |s| <= delta";
        rep.conditions.push_back(cond);
    }
    // (iv) Pi(alpha_t, alpha_t) >= c on s in [-b0, 0]
    scan("parallel_normal_curvature", [&](double s) { return s <= 1e-14; },
         [&](int i, int j) { return patch.node(i, j).second_form(0, 0); }, c_min, true);
    return rep;
}

}  // namespace shellkorn
