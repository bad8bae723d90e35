#include "toric/grid.h"

#include <stdexcept>

namespace toric {

TensorGrid::TensorGrid(std::vector<std::vector<double>> axes) : axes_(std::move(axes))
{
    if(axes_.empty() || axes_.size() > static_cast<std::size_t>(MAX_DIM))
        throw std::invalid_argument("TensorGrid: unsupported dimension");
    strides_.assign(axes_.size(), 1);
    size_ = 1;
    for(std::size_t a = axes_.size(); a-- > 0;) {
        if(axes_[a].empty())
            throw std::invalid_argument("TensorGrid: empty axis");
        require_increasing(axes_[a], "TensorGrid axis");
        strides_[a] = size_;
        size_ *= axes_[a].size();
    }
}

TensorGrid TensorGrid::uniform(int dim, double lo, double hi, std::size_t n)
{
    return TensorGrid(std::vector<std::vector<double>>(dim, linspace(lo, hi, n)));
}

TensorGrid::Multi TensorGrid::multi(std::size_t flat) const
{
    Multi idx{};
    for(std::size_t a = 0; a < axes_.size(); a++) {
        idx[a] = flat / strides_[a];
        flat %= strides_[a];
    }
    return idx;
}

std::size_t TensorGrid::flat(const Multi& idx) const
{
    std::size_t f = 0;
    for(std::size_t a = 0; a < axes_.size(); a++)
        f += idx[a] * strides_[a];
    return f;
}

Vec TensorGrid::node(std::size_t flat) const
{
    const Multi idx = multi(flat);
    Vec v(dim());
    for(int a = 0; a < dim(); a++)
        v[a] = axes_[a][idx[a]];
    return v;
}

bool TensorGrid::is_interior(std::size_t flat, std::size_t margin) const
{
    const Multi idx = multi(flat);
    for(int a = 0; a < dim(); a++)
        if(idx[a] < margin || idx[a] + margin >= axes_[a].size())
            return false;
    return true;
}

bool TensorGrid::contains(const Vec& p) const
{
    if(p.size() != dim())
        return false;
    for(int a = 0; a < dim(); a++)
        if(p[a] < axes_[a].front() || p[a] > axes_[a].back())
            return false;
    return true;
}

namespace {

// first derivative along axis a of sampled values at flat index
double diff1(const TensorGrid& g, std::span<const double> v, std::size_t flat, int a)
{
    const auto idx = g.multi(flat);
    const auto& ax = g.axis(a);
    const std::size_t i = idx[a], s = g.stride(a);
    return fd_first(ax[i] - ax[i - 1], ax[i + 1] - ax[i], v[flat - s], v[flat], v[flat + s]);
}

}  // namespace

Vec fd_gradient(const TensorGrid& grid, std::span<const double> values, std::size_t flat)
{
    if(!grid.is_interior(flat, 1))
        throw std::invalid_argument("fd_gradient: node on the grid edge");
    Vec g(grid.dim());
    for(int a = 0; a < grid.dim(); a++)
        g[a] = diff1(grid, values, flat, a);
    return g;
}

Mat fd_hessian(const TensorGrid& grid, std::span<const double> values, std::size_t flat)
{
    if(!grid.is_interior(flat, 1))
        throw std::invalid_argument("fd_hessian: node on the grid edge");
    const int m = grid.dim();
    const auto idx = grid.multi(flat);
    Mat h(m, m);
    for(int a = 0; a < m; a++) {
        const auto& ax = grid.axis(a);
        const std::size_t i = idx[a], s = grid.stride(a);
        const double hm = ax[i] - ax[i - 1], hp = ax[i + 1] - ax[i];
        h(a, a) = fd_second(hm, hp, values[flat - s], values[flat], values[flat + s]);
        for(int b = a + 1; b < m; b++) {
            const double dm = diff1(grid, values, flat - s, b);
            const double d0 = diff1(grid, values, flat, b);
            const double dp = diff1(grid, values, flat + s, b);
            h(a, b) = h(b, a) = fd_first(hm, hp, dm, d0, dp);
        }
    }
    return h;
}

bool is_positive_definite(const Mat& h)
{
    Eigen::LLT<Mat> llt(h);
    return llt.info() == Eigen::Success;
}

}  // namespace toric
