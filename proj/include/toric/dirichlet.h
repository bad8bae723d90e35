#pragma once
/// Harmonic extension of boundary data over flat parameter domains: the unit
/// interval, the unit disc and axis-aligned rectangles.
///
/// Kernels are stored positive, K = -d_nu G, so an extension is always
/// sum_q w_q g_q with w_q >= 0.

#include "toric/numerics.h"

#include <memory>
#include <vector>

namespace toric {

enum class DomainKind { Interval, Disc, Rectangle };

/// Node layouts
///   Interval : t_0 = 0 < ... < t_{n-1} = 1; boundary nodes are the two ends.
///   Disc     : node 0 is the centre, then ring i (radius r_i) angle j at
///              1 + i*na + j with angle 2 pi j / na; the last ring is r = 1
///              and forms the boundary.
///   Rectangle: row-major over (x_i, y_j), y fastest; boundary where either
///              index is at an edge.
class DomainN {
public:
    static DomainN interval(std::size_t n);
    static DomainN interval(std::vector<double> t);
    /// `radii` strictly increasing in (0,1); the boundary ring r = 1 is
    /// appended. `angles` must be even and at least 64.
    static DomainN disc(std::vector<double> radii, std::size_t angles = 256);
    static DomainN rectangle(std::vector<double> x, std::vector<double> y);

    DomainKind kind() const { return kind_; }
    /// 1 for the interval, 2 otherwise
    int dim() const { return kind_ == DomainKind::Interval ? 1 : 2; }
    std::size_t size() const { return size_; }
    /// Cartesian coordinates of a node
    Vec node(std::size_t i) const;
    bool is_boundary(std::size_t i) const { return boundary_flag_[i] != 0; }
    /// boundary node indices in the order boundary data is supplied
    const std::vector<std::size_t>& boundary_nodes() const { return boundary_; }
    std::vector<std::size_t> interior_nodes() const;

    /// Interval samples or rectangle x-axis
    const std::vector<double>& axis(int a) const { return axes_.at(a); }
    /// disc rings including r = 1
    const std::vector<double>& radii() const { return radii_; }
    std::size_t angle_count() const { return angles_; }
    double angle(std::size_t j) const;
    /// disc node index of ring i, angle j
    std::size_t disc_index(std::size_t ring, std::size_t j) const { return 1 + ring * angles_ + j; }

private:
    DomainKind kind_ = DomainKind::Interval;
    std::vector<std::vector<double>> axes_;
    std::vector<double> radii_;
    std::size_t angles_ = 0;
    std::size_t size_ = 0;
    std::vector<std::size_t> boundary_;
    std::vector<char> boundary_flag_;
    void finish();
};

/// values at DomainN::boundary_nodes(), in that order
using BoundaryData = std::vector<double>;
/// values at every node of a DomainN
using HarmonicField = std::vector<double>;

/// (1/2pi) (1 - r^2) / (1 - 2 r cos theta + r^2); rejects r outside [0,1)
double poisson_kernel(double r, double theta);

/// Weights w_q >= 0 with extension(point) = sum_q w_q g_q for the interval
/// (linear interpolation) and the disc (trapezoid Poisson integral; the point
/// may be any point of the closed disc). Rectangles have no closed-form
/// kernel and are rejected.
std::vector<double> extension_weights(const DomainN& N, const Vec& point);

/// Sparse factorisation of the 5-point Dirichlet Laplacian on a rectangle,
/// reusable across boundary data sets.
class RectangleExtender {
public:
    explicit RectangleExtender(const DomainN& N);
    ~RectangleExtender();
    RectangleExtender(RectangleExtender&&) noexcept;
    HarmonicField extend(std::span<const double> g) const;
private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Weight rows w[node][q] with extension(node) = sum_q w[node][q] g_q for all
/// three domains (unit boundary data solves on rectangles).
std::vector<std::vector<double>> kernel_table(const DomainN& N);

/// Harmonic extension of boundary data; boundary nodes receive g exactly.
HarmonicField harmonic_extend(const DomainN& N, std::span<const double> g);

/// Sup over interior nodes of the magnitude of the discrete Laplacian (polar
/// differences on the disc).
double laplace_residual(const DomainN& N, std::span<const double> field);

}  // namespace toric
