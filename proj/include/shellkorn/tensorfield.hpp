#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "shellkorn/geometry.hpp"

namespace shellkorn {

// Order-0/1/2 tensor field sampled on the patch grid, coordinate components,
// lower indices. Order-2 component layout: c = 2*a + b for T_{ab}.
class TensorField {
  public:
    TensorField(const SurfacePatch& patch, int order)
        : patch_(&patch), order_(order) {
        if (order < 0 || order > 2) throw std::invalid_argument("tensor order must be 0, 1 or 2");
        data_.assign(static_cast<size_t>(patch.num_nodes()) * comps(), 0.0);
    }

    int order() const { return order_; }
    int comps() const { return order_ == 0 ? 1 : (order_ == 1 ? 2 : 4); }
    const SurfacePatch& patch() const { return *patch_; }

    double& at(int i, int j, int c = 0) {
        return data_[static_cast<size_t>(patch_->node_index(i, j)) * comps() + c];
    }
    double at(int i, int j, int c = 0) const {
        return data_[static_cast<size_t>(patch_->node_index(i, j)) * comps() + c];
    }

    Eigen::Vector2d vec(int i, int j) const {
        return Eigen::Vector2d(at(i, j, 0), at(i, j, 1));
    }
    void set_vec(int i, int j, const Eigen::Vector2d& v) {
        at(i, j, 0) = v(0);
        at(i, j, 1) = v(1);
    }
    Mat2 mat(int i, int j) const {
        Mat2 m;
        m << at(i, j, 0), at(i, j, 1), at(i, j, 2), at(i, j, 3);
        return m;
    }
    void set_mat(int i, int j, const Mat2& m) {
        at(i, j, 0) = m(0, 0);
        at(i, j, 1) = m(0, 1);
        at(i, j, 2) = m(1, 0);
        at(i, j, 3) = m(1, 1);
    }

    const std::vector<double>& raw() const { return data_; }
    std::vector<double>& raw() { return data_; }

  private:
    const SurfacePatch* patch_;
    int order_;
    std::vector<double> data_;
};

}  // namespace shellkorn
