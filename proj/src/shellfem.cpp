#include "shellkorn/shellfem.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace shellkorn {

namespace {

constexpr double kGauss = 0.5773502691896257645;  // 1/sqrt(3)

// reference-cube corner offsets, node q = (dt, ds, dxi)
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};

void shape_functions(double xi, double eta, double zeta, double N[8], double dN[8][3]) {
    for (int q = 0; q < 8; ++q) {
        const double sx = kCorner[q][0] ? 1.0 : -1.0;
        const double sy = kCorner[q][1] ? 1.0 : -1.0;
        const double sz = kCorner[q][2] ? 1.0 : -1.0;
        N[q] = 0.125 * (1 + sx * xi) * (1 + sy * eta) * (1 + sz * zeta);
        dN[q][0] = 0.125 * sx * (1 + sy * eta) * (1 + sz * zeta);
        dN[q][1] = 0.125 * (1 + sx * xi) * sy * (1 + sz * zeta);
        dN[q][2] = 0.125 * (1 + sx * xi) * (1 + sy * eta) * sz;
    }
}

}  // namespace

ShellMesh::ShellMesh(const SurfacePatch& patch, double h, int n_t, int n_s, int n_xi)
    : n_t_(n_t), n_s_(n_s), n_xi_(n_xi), h_(h) {
    if (!(h > 0.0)) throw std::invalid_argument("thickness must be positive");
    if (n_xi < 2) throw std::invalid_argument("n_xi must be >= 2");
    if (n_t < 4 || n_s < 2) throw std::invalid_argument("degenerate shell grid");
    const double max_curv = patch.max_principal_curvature();
    if (h * max_curv >= 1.5) {
        std::ostringstream msg;
        msg << "shell thickness " << h << " violates the focal bound: max principal curvature "
            << max_curv << " requires h < " << 1.5 / max_curv;
        throw std::invalid_argument(msg.str());
    }

    const BandSpec& band = patch.spec();
    const SurfaceMap& map = patch.map();
    const double dt = band.period / n_t;
    const double ds = (band.b0 + band.b1) / n_s;
    const double dxi = h / n_xi;
    positions_.resize(static_cast<size_t>(num_nodes()));
    for (int ix = 0; ix <= n_xi; ++ix)
        for (int is = 0; is <= n_s; ++is)
            for (int it = 0; it < n_t; ++it) {
                const double t = it * dt;
                const double s = -band.b0 + is * ds;
                const double xi = -0.5 * h + ix * dxi;
                SurfaceJet j = map.jet(t, s);
                Vec3 n = j.d_t.cross(j.d_s);
                n /= n.norm();
                positions_[node_index(it, is, ix)] = j.position + xi * n;
            }

    // dof map: 3 dofs per node; nodes on s-extreme planes are clamped
    dof_map_.assign(static_cast<size_t>(num_nodes()) * 3, -1);
    int next = 0;
    for (int ix = 0; ix <= n_xi; ++ix)
        for (int is = 0; is <= n_s; ++is)
            for (int it = 0; it < n_t; ++it) {
                if (clamped_node(is)) continue;
                const int base = node_index(it, is, ix) * 3;
                for (int c = 0; c < 3; ++c) dof_map_[base + c] = next++;
            }
    num_free_dofs_ = next;

    // positivity of the isoparametric Jacobian at every Gauss point
    double min_det = std::numeric_limits<double>::infinity();
    const double gauss[2] = {-kGauss, kGauss};
    double N[8], dN[8][3];
    for (int ix = 0; ix < n_xi; ++ix)
        for (int is = 0; is < n_s; ++is)
            for (int it = 0; it < n_t; ++it) {
                Vec3 xq[8];
                for (int q = 0; q < 8; ++q)
                    xq[q] = positions_[node_index(it + kCorner[q][0], is + kCorner[q][1],
                                                  ix + kCorner[q][2])];
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c) {
                            shape_functions(gauss[a], gauss[b], gauss[c], N, dN);
                            Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
                            for (int q = 0; q < 8; ++q)
                                for (int u = 0; u < 3; ++u) J.col(u) += dN[q][u] * xq[q];
                            min_det = std::min(min_det, J.determinant());
                        }
            }
    min_det_jacobian_ = min_det;
    if (!(min_det > 0.0)) {
        std::ostringstream msg;
        msg << "shell mesh self-intersects (det J = " << min_det
            << " <= 0); max principal curvature " << max_curv;
        throw std::invalid_argument(msg.str());
    }
}

int ShellMesh::node_index(int it, int is, int ix) const {
    it %= n_t_;
    if (it < 0) it += n_t_;
    return (ix * (n_s_ + 1) + is) * n_t_ + it;
}

const Vec3& ShellMesh::node_position(int it, int is, int ix) const {
    return positions_[node_index(it, is, ix)];
}

ShellMesh build_shell_mesh(const SurfacePatch& patch, double h, int n_t, int n_s, int n_xi) {
    return ShellMesh(patch, h, n_t, n_s, n_xi);
}

FormPair assemble_forms(const ShellMesh& mesh, bool reduced) {
    const int nfree = reduced ? mesh.num_free_dofs() : mesh.num_nodes() * 3;
    auto dof_of = [&](int nodal) { return reduced ? mesh.dof_map()[nodal] : nodal; };
    std::vector<Eigen::Triplet<double>> ta, tb;
    ta.reserve(static_cast<size_t>(mesh.num_elements()) * 24 * 24 / 2);
    tb.reserve(static_cast<size_t>(mesh.num_elements()) * 24 * 24 / 2);
    const double gauss[2] = {-kGauss, kGauss};
    double N[8], dN[8][3];
    double volume = 0.0;

    for (int ix = 0; ix < mesh.n_xi(); ++ix)
        for (int is = 0; is < mesh.n_s(); ++is)
            for (int it = 0; it < mesh.n_t(); ++it) {
                Vec3 xq[8];
                int nodes[8];
                for (int q = 0; q < 8; ++q) {
                    const int jt = it + kCorner[q][0], js = is + kCorner[q][1],
                              jx = ix + kCorner[q][2];
                    nodes[q] = mesh.node_index(jt, js, jx);
                    xq[q] = mesh.node_position(jt, js, jx);
                }
                Eigen::Matrix<double, 24, 24> ae = Eigen::Matrix<double, 24, 24>::Zero();
                Eigen::Matrix<double, 24, 24> be = Eigen::Matrix<double, 24, 24>::Zero();
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c) {
                            shape_functions(gauss[a], gauss[b], gauss[c], N, dN);
                            Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
                            for (int q = 0; q < 8; ++q)
                                for (int u = 0; u < 3; ++u) J.col(u) += dN[q][u] * xq[q];
                            const double detJ = J.determinant();
                            if (!(detJ > 0.0))
                                throw std::runtime_error("singular element Jacobian in assembly");
                            const Eigen::Matrix3d Jinv = J.inverse();
                            volume += detJ;
                            // physical gradients G_q = Jinv^T gradref N_q
                            Eigen::Matrix<double, 8, 3> G;
                            for (int q = 0; q < 8; ++q) {
                                Eigen::Vector3d gr(dN[q][0], dN[q][1], dN[q][2]);
                                G.row(q) = (Jinv.transpose() * gr).transpose();
                            }
                            // grad y = sum_q y_q (x) G_q;
                            // |grad|^2 -> (G_q . G_r) delta_ij
                            // |sym grad|^2 -> 1/2 (G_q . G_r) delta_ij + 1/2 G_qj G_ri
                            for (int q = 0; q < 8; ++q)
                                for (int r = 0; r < 8; ++r) {
                                    const double gg = G.row(q).dot(G.row(r)) * detJ;
                                    for (int i2 = 0; i2 < 3; ++i2) {
                                        be(3 * q + i2, 3 * r + i2) += gg;
                                        ae(3 * q + i2, 3 * r + i2) += 0.5 * gg;
                                        for (int j2 = 0; j2 < 3; ++j2)
                                            ae(3 * q + i2, 3 * r + j2) +=
                                                0.5 * G(q, j2) * G(r, i2) * detJ;
                                    }
                                }
                        }
                for (int q = 0; q < 8; ++q)
                    for (int i2 = 0; i2 < 3; ++i2) {
                        const int row = dof_of(nodes[q] * 3 + i2);
                        if (row < 0) continue;
                        for (int r = 0; r < 8; ++r)
                            for (int j2 = 0; j2 < 3; ++j2) {
                                const int col = dof_of(nodes[r] * 3 + j2);
                                if (col < 0) continue;
                                ta.emplace_back(row, col, ae(3 * q + i2, 3 * r + j2));
                                tb.emplace_back(row, col, be(3 * q + i2, 3 * r + j2));
                            }
                    }
            }

    FormPair out;
    out.A.resize(nfree, nfree);
    out.B.resize(nfree, nfree);
    out.A.setFromTriplets(ta.begin(), ta.end());
    out.B.setFromTriplets(tb.begin(), tb.end());
    out.A.makeCompressed();
    out.B.makeCompressed();
    out.volume = volume;
    return out;
}

Eigen::VectorXd interpolate_reduced(const ShellMesh& mesh,
                                    const std::function<Vec3(const Vec3&)>& field) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(mesh.num_free_dofs());
    for (int ix = 0; ix <= mesh.n_xi(); ++ix)
        for (int is = 0; is <= mesh.n_s(); ++is)
            for (int it = 0; it < mesh.n_t(); ++it) {
                const int node = mesh.node_index(it, is, ix);
                const Vec3 v = field(mesh.node_position(it, is, ix));
                for (int c = 0; c < 3; ++c) {
                    const int dof = mesh.dof_map()[node * 3 + c];
                    if (dof >= 0) x(dof) = v(c);
                }
            }
    return x;
}

void export_matrix(const Eigen::SparseMatrix<double>& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
            out << it.row() << " " << it.col() << " " << std::scientific << it.value() << "\n";
}

}  // namespace shellkorn
