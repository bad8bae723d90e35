#pragma once
/// Tensor-product sample grids and centered finite differences on them.

#include "toric/numerics.h"

#include <array>
#include <vector>

namespace toric {

/// Tensor grid with strictly increasing per-axis samples; flat indices are
/// row-major (last axis fastest).
class TensorGrid {
public:
    using Multi = std::array<std::size_t, MAX_DIM>;

    TensorGrid() = default;
    explicit TensorGrid(std::vector<std::vector<double>> axes);
    static TensorGrid uniform(int dim, double lo, double hi, std::size_t n);

    int dim() const { return static_cast<int>(axes_.size()); }
    std::size_t size() const { return size_; }
    const std::vector<double>& axis(int a) const { return axes_.at(a); }
    const std::vector<std::vector<double>>& axes() const { return axes_; }
    std::size_t extent(int a) const { return axes_[a].size(); }
    std::size_t stride(int a) const { return strides_[a]; }

    Multi multi(std::size_t flat) const;
    std::size_t flat(const Multi& idx) const;
    Vec node(std::size_t flat) const;

    /// true if every axis index lies at least `margin` cells from both ends
    bool is_interior(std::size_t flat, std::size_t margin = 1) const;
    bool contains(const Vec& p) const;

    bool operator==(const TensorGrid& other) const { return axes_ == other.axes_; }

private:
    std::vector<std::vector<double>> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

/// Centered FD gradient / Hessian of sampled values at an interior node
/// (non-uniform 3-point stencils; mixed terms by nested differences).
Vec fd_gradient(const TensorGrid& grid, std::span<const double> values, std::size_t flat);
Mat fd_hessian(const TensorGrid& grid, std::span<const double> values, std::size_t flat);

/// True if the symmetric matrix is positive definite (Cholesky succeeds).
bool is_positive_definite(const Mat& h);

}  // namespace toric
