#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <vector>

#include "shellkorn/geometry.hpp"

// The 3D thin shell of thickness h over a surface band, meshed with trilinear
// hexahedra, and the two quadratic forms of the Korn quotient.

namespace shellkorn {

class ShellMesh {
  public:
    // n_t, n_s, n_xi are element counts; t-periodic.
    ShellMesh(const SurfacePatch& patch, double h, int n_t, int n_s, int n_xi);

    int n_t() const { return n_t_; }
    int n_s() const { return n_s_; }
    int n_xi() const { return n_xi_; }
    double thickness() const { return h_; }

    int num_nodes() const { return n_t_ * (n_s_ + 1) * (n_xi_ + 1); }
    int num_elements() const { return n_t_ * n_s_ * n_xi_; }
    int node_index(int it, int is, int ix) const;  // it wraps periodically
    const Vec3& node_position(int it, int is, int ix) const;

    bool clamped_node(int is) const { return is == 0 || is == n_s_; }
    int num_clamped_nodes() const { return 2 * n_t_ * (n_xi_ + 1); }

    // free-dof numbering: -1 for clamped, otherwise index into the reduced system
    const std::vector<int>& dof_map() const { return dof_map_; }
    int num_free_dofs() const { return num_free_dofs_; }

    double min_jacobian() const { return min_det_jacobian_; }

  private:
    int n_t_, n_s_, n_xi_;
    double h_;
    std::vector<Vec3> positions_;
    std::vector<int> dof_map_;
    int num_free_dofs_ = 0;
    double min_det_jacobian_ = 0.0;

    friend struct FormAssembler;
};

// Throws std::invalid_argument on a focal-bound violation
// (h * max principal curvature >= 1.5) or a degenerate grid.
ShellMesh build_shell_mesh(const SurfacePatch& patch, double h, int n_t, int n_s, int n_xi);

struct FormPair {
    Eigen::SparseMatrix<double> A;  // int |sym grad y|^2, reduced to free dofs
    Eigen::SparseMatrix<double> B;  // int |grad y|^2, reduced to free dofs
    double volume = 0.0;            // int det J (quadrature volume of the shell)
};

// Trilinear hexahedra, 2x2x2 Gauss quadrature. By default the clamped
// rows/cols are eliminated; reduced = false keeps all nodal dofs (used by
// tests probing rigid motions, which a clamp would exclude).
FormPair assemble_forms(const ShellMesh& mesh, bool reduced = true);

// Nodal interpolation of an ambient field onto the reduced dof vector
// (clamped entries dropped).
Eigen::VectorXd interpolate_reduced(const ShellMesh& mesh,
                                    const std::function<Vec3(const Vec3&)>& field);

// coordinate-format text export: "row col value" per line, 0-based
void export_matrix(const Eigen::SparseMatrix<double>& m, const std::string& path);

}  // namespace shellkorn
