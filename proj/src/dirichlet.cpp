#include "toric/dirichlet.h"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>

namespace toric {

namespace {

constexpr double TWO_PI = 2 * std::numbers::pi;

/// interior rectangle grids up to this many unknowns use a direct solver
constexpr std::size_t DIRECT_LIMIT = 256 * 256;

/// 5-point coefficients at (i, j): neighbours west, east, south, north and
/// the diagonal of the Laplacian on a non-uniform grid
struct Stencil {
    double w, e, s, n, c;
};

Stencil stencil(const std::vector<double>& x, const std::vector<double>& y, std::size_t i, std::size_t j)
{
    const double hw = x[i] - x[i - 1], he = x[i + 1] - x[i];
    const double hs = y[j] - y[j - 1], hn = y[j + 1] - y[j];
    Stencil st;
    st.w = 2 / (hw * (hw + he));
    st.e = 2 / (he * (hw + he));
    st.s = 2 / (hs * (hs + hn));
    st.n = 2 / (hn * (hs + hn));
    st.c = -(st.w + st.e + st.s + st.n);
    return st;
}

}  // namespace

// ---------------------------------------------------------------- domains

DomainN DomainN::interval(std::size_t n)
{
    if(n < 2)
        throw std::invalid_argument("DomainN::interval: need at least two nodes");
    return interval(linspace(0, 1, n));
}

DomainN DomainN::interval(std::vector<double> t)
{
    if(t.size() < 2 || t.front() != 0.0 || t.back() != 1.0)
        throw std::invalid_argument("DomainN::interval: samples must run from 0 to 1");
    require_increasing(t, "interval samples");
    DomainN N;
    N.kind_ = DomainKind::Interval;
    N.size_ = t.size();
    N.axes_ = {std::move(t)};
    N.finish();
    return N;
}

DomainN DomainN::disc(std::vector<double> radii, std::size_t angles)
{
    if(angles < 64 || angles % 2)
        throw std::invalid_argument("DomainN::disc: angular node count must be even and at least 64");
    require_increasing(radii, "disc radii");
    if(!radii.empty() && (radii.front() <= 0 || radii.back() >= 1))
        throw std::invalid_argument("DomainN::disc: interior radii must lie in (0,1)");
    radii.push_back(1.0);
    DomainN N;
    N.kind_ = DomainKind::Disc;
    N.radii_ = std::move(radii);
    N.angles_ = angles;
    N.size_ = 1 + N.radii_.size() * angles;
    N.finish();
    return N;
}

DomainN DomainN::rectangle(std::vector<double> x, std::vector<double> y)
{
    if(x.size() < 3 || y.size() < 3)
        throw std::invalid_argument("DomainN::rectangle: need at least three nodes per axis");
    require_increasing(x, "rectangle x-axis");
    require_increasing(y, "rectangle y-axis");
    DomainN N;
    N.kind_ = DomainKind::Rectangle;
    N.size_ = x.size() * y.size();
    N.axes_ = {std::move(x), std::move(y)};
    N.finish();
    return N;
}

void DomainN::finish()
{
    boundary_flag_.assign(size_, 0);
    boundary_.clear();
    switch(kind_) {
    case DomainKind::Interval:
        boundary_ = {0, size_ - 1};
        break;
    case DomainKind::Disc:
        for(std::size_t j = 0; j < angles_; j++)
            boundary_.push_back(disc_index(radii_.size() - 1, j));
        break;
    case DomainKind::Rectangle: {
        const std::size_t nx = axes_[0].size(), ny = axes_[1].size();
        for(std::size_t i = 0; i < nx; i++)
            for(std::size_t j = 0; j < ny; j++)
                if(i == 0 || j == 0 || i + 1 == nx || j + 1 == ny)
                    boundary_.push_back(i * ny + j);
        break;
    }
    }
    for(std::size_t b : boundary_)
        boundary_flag_[b] = 1;
}

std::vector<std::size_t> DomainN::interior_nodes() const
{
    std::vector<std::size_t> out;
    for(std::size_t i = 0; i < size_; i++)
        if(!boundary_flag_[i])
            out.push_back(i);
    return out;
}

double DomainN::angle(std::size_t j) const
{
    return TWO_PI * static_cast<double>(j) / static_cast<double>(angles_);
}

Vec DomainN::node(std::size_t i) const
{
    if(i >= size_)
        throw std::out_of_range("DomainN::node: index out of range");
    switch(kind_) {
    case DomainKind::Interval:
        return Vec::Constant(1, axes_[0][i]);
    case DomainKind::Disc: {
        Vec p = Vec::Zero(2);
        if(i == 0)
            return p;
        const std::size_t ring = (i - 1) / angles_, j = (i - 1) % angles_;
        p << radii_[ring] * std::cos(angle(j)), radii_[ring] * std::sin(angle(j));
        return p;
    }
    case DomainKind::Rectangle: {
        const std::size_t ny = axes_[1].size();
        Vec p(2);
        p << axes_[0][i / ny], axes_[1][i % ny];
        return p;
    }
    }
    return {};
}

// ---------------------------------------------------------------- kernels

double poisson_kernel(double r, double theta)
{
    if(!(r >= 0 && r < 1))
        throw std::invalid_argument("poisson_kernel: radius must lie in [0,1)");
    return (1 - r * r) / (TWO_PI * (1 - 2 * r * std::cos(theta) + r * r));
}

std::vector<double> extension_weights(const DomainN& N, const Vec& point)
{
    switch(N.kind()) {
    case DomainKind::Interval: {
        const double t = point[0];
        if(t < 0 || t > 1)
            throw std::invalid_argument("extension_weights: point outside the interval");
        return {1 - t, t};
    }
    case DomainKind::Disc: {
        const std::size_t n = N.angle_count();
        const double r = std::hypot(point[0], point[1]);
        const double gamma = std::atan2(point[1], point[0]);
        std::vector<double> w(n, 0.0);
        if(r > 1 + 1e-14)
            throw std::invalid_argument("extension_weights: point outside the disc");
        if(r >= 1 - 1e-14) {
            const double pos = std::remainder(gamma, TWO_PI) / TWO_PI * static_cast<double>(n);
            const double j = std::round(pos);
            if(std::fabs(pos - j) > 1e-9)
                throw std::invalid_argument("extension_weights: boundary point between quadrature nodes");
            w[static_cast<std::size_t>((static_cast<long>(j) % static_cast<long>(n) + static_cast<long>(n)) % static_cast<long>(n))] = 1;
            return w;
        }
        // trapezoid rule for the Poisson integral, normalised so constants
        // are reproduced exactly (the defect is O(r^n))
        double sum = 0;
        for(std::size_t j = 0; j < n; j++) {
            w[j] = poisson_kernel(r, gamma - N.angle(j));
            sum += w[j];
        }
        for(double& x : w)
            x /= sum;
        return w;
    }
    case DomainKind::Rectangle:
        break;
    }
    throw std::invalid_argument("extension_weights: no closed-form kernel for rectangles");
}

// ---------------------------------------------------------------- rectangle

struct RectangleExtender::Impl {
    std::vector<double> x, y;
    std::vector<std::size_t> boundary;
    std::vector<long> unknown;  // node -> unknown index or -1
    std::vector<std::size_t> nodes;  // unknown -> node
    Eigen::SparseMatrix<double> A;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> iterative;
    bool direct = true;
};

RectangleExtender::RectangleExtender(const DomainN& N) : impl_(std::make_unique<Impl>())
{
    if(N.kind() != DomainKind::Rectangle)
        throw std::invalid_argument("RectangleExtender: domain is not a rectangle");
    Impl& s = *impl_;
    s.x = N.axis(0);
    s.y = N.axis(1);
    s.boundary = N.boundary_nodes();
    const std::size_t ny = s.y.size();
    s.unknown.assign(N.size(), -1);
    for(std::size_t i = 0; i < N.size(); i++)
        if(!N.is_boundary(i)) {
            s.unknown[i] = static_cast<long>(s.nodes.size());
            s.nodes.push_back(i);
        }
    std::vector<Eigen::Triplet<double>> trip;
    for(std::size_t u = 0; u < s.nodes.size(); u++) {
        const std::size_t node = s.nodes[u], i = node / ny, j = node % ny;
        const Stencil st = stencil(s.x, s.y, i, j);
        trip.emplace_back(u, u, -st.c);
        const std::pair<std::size_t, double> nb[4] = {{node - ny, st.w}, {node + ny, st.e}, {node - 1, st.s}, {node + 1, st.n}};
        for(auto [k, c] : nb)
            if(s.unknown[k] >= 0)
                trip.emplace_back(u, s.unknown[k], -c);
    }
    s.A.resize(s.nodes.size(), s.nodes.size());
    s.A.setFromTriplets(trip.begin(), trip.end());
    s.direct = s.nodes.size() <= DIRECT_LIMIT;
    if(s.direct) {
        s.lu.compute(s.A);
        if(s.lu.info() != Eigen::Success)
            throw NumericalError("RectangleExtender: sparse factorisation failed");
    } else {
        s.iterative.setTolerance(1e-10);
        s.iterative.setMaxIterations(20000);
        s.iterative.compute(s.A);
        if(s.iterative.info() != Eigen::Success)
            throw NumericalError("RectangleExtender: preconditioner setup failed");
    }
}

RectangleExtender::~RectangleExtender() = default;
RectangleExtender::RectangleExtender(RectangleExtender&&) noexcept = default;

HarmonicField RectangleExtender::extend(std::span<const double> g) const
{
    const Impl& s = *impl_;
    if(g.size() != s.boundary.size())
        throw std::invalid_argument("harmonic_extend: boundary data size mismatch");
    const std::size_t ny = s.y.size();
    HarmonicField field(s.unknown.size(), 0.0);
    for(std::size_t b = 0; b < s.boundary.size(); b++) {
        if(!std::isfinite(g[b]))
            throw std::invalid_argument("harmonic_extend: non-finite boundary value");
        field[s.boundary[b]] = g[b];
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.nodes.size()));
    for(std::size_t u = 0; u < s.nodes.size(); u++) {
        const std::size_t node = s.nodes[u], i = node / ny, j = node % ny;
        const Stencil st = stencil(s.x, s.y, i, j);
        const std::pair<std::size_t, double> nb[4] = {{node - ny, st.w}, {node + ny, st.e}, {node - 1, st.s}, {node + 1, st.n}};
        for(auto [k, c] : nb)
            if(s.unknown[k] < 0)
                rhs[u] += c * field[k];
    }
    Eigen::VectorXd sol;
    if(s.direct) {
        sol = s.lu.solve(rhs);
        if(s.lu.info() != Eigen::Success)
            throw NumericalError("harmonic_extend: sparse solve failed");
    } else {
        sol = s.iterative.solve(rhs);
        if(s.iterative.info() != Eigen::Success)
            throw NumericalError("harmonic_extend: BiCGSTAB did not reach tolerance 1e-10 (error "
                + std::to_string(s.iterative.error()) + ")");
    }
    for(std::size_t u = 0; u < s.nodes.size(); u++)
        field[s.nodes[u]] = sol[u];
    return field;
}

// ---------------------------------------------------------------- extension

HarmonicField harmonic_extend(const DomainN& N, std::span<const double> g)
{
    const auto& bnd = N.boundary_nodes();
    if(g.size() != bnd.size())
        throw std::invalid_argument("harmonic_extend: boundary data size mismatch");
    for(double v : g)
        if(!std::isfinite(v))
            throw std::invalid_argument("harmonic_extend: non-finite boundary value");
    if(N.kind() == DomainKind::Rectangle)
        return RectangleExtender(N).extend(g);
    HarmonicField field(N.size());
    for(std::size_t i = 0; i < N.size(); i++) {
        if(N.is_boundary(i))
            continue;
        const auto w = extension_weights(N, N.node(i));
        double s = 0;
        for(std::size_t q = 0; q < w.size(); q++)
            s += w[q] * g[q];
        field[i] = s;
    }
    for(std::size_t b = 0; b < bnd.size(); b++)
        field[bnd[b]] = g[b];
    return field;
}

std::vector<std::vector<double>> kernel_table(const DomainN& N)
{
    const auto& bnd = N.boundary_nodes();
    std::vector<std::vector<double>> w(N.size(), std::vector<double>(bnd.size(), 0.0));
    if(N.kind() == DomainKind::Rectangle) {
        const RectangleExtender ext(N);
        std::vector<double> unit(bnd.size(), 0.0);
        for(std::size_t q = 0; q < bnd.size(); q++) {
            unit[q] = 1;
            const auto col = ext.extend(unit);
            unit[q] = 0;
            for(std::size_t i = 0; i < N.size(); i++)
                w[i][q] = col[i];
        }
        return w;
    }
    for(std::size_t i = 0; i < N.size(); i++)
        if(!N.is_boundary(i))
            w[i] = extension_weights(N, N.node(i));
    for(std::size_t q = 0; q < bnd.size(); q++)
        w[bnd[q]][q] = 1;
    return w;
}

double laplace_residual(const DomainN& N, std::span<const double> f)
{
    if(f.size() != N.size())
        throw std::invalid_argument("laplace_residual: field size mismatch");
    double res = 0;
    switch(N.kind()) {
    case DomainKind::Interval: {
        const auto& t = N.axis(0);
        for(std::size_t i = 1; i + 1 < t.size(); i++)
            res = std::max(res, std::fabs(fd_second(t[i] - t[i - 1], t[i + 1] - t[i], f[i - 1], f[i], f[i + 1])));
        break;
    }
    case DomainKind::Rectangle: {
        const auto &x = N.axis(0), &y = N.axis(1);
        const std::size_t ny = y.size();
        for(std::size_t node : N.interior_nodes()) {
            const std::size_t i = node / ny, j = node % ny;
            const Stencil st = stencil(x, y, i, j);
            const double lap = st.w * f[node - ny] + st.e * f[node + ny] + st.s * f[node - 1] + st.n * f[node + 1] + st.c * f[node];
            res = std::max(res, std::fabs(lap));
        }
        break;
    }
    case DomainKind::Disc: {
        const auto& r = N.radii();
        const std::size_t na = N.angle_count();
        const double dth = TWO_PI / static_cast<double>(na);
        // centre: mean value over the first ring
        double mean = 0;
        for(std::size_t j = 0; j < na; j++)
            mean += f[N.disc_index(0, j)];
        mean /= static_cast<double>(na);
        res = std::fabs(4 * (mean - f[0]) / (r[0] * r[0]));
        for(std::size_t ring = 0; ring + 1 < r.size(); ring++) {
            const double rm = ring == 0 ? 0.0 : r[ring - 1], r0 = r[ring], rp = r[ring + 1];
            for(std::size_t j = 0; j < na; j++) {
                const double fm = ring == 0 ? f[0] : f[N.disc_index(ring - 1, j)];
                const double f0 = f[N.disc_index(ring, j)], fp = f[N.disc_index(ring + 1, j)];
                const double fa = f[N.disc_index(ring, (j + na - 1) % na)], fb = f[N.disc_index(ring, (j + 1) % na)];
                const double frr = fd_second(r0 - rm, rp - r0, fm, f0, fp);
                const double fr = fd_first(r0 - rm, rp - r0, fm, f0, fp);
                const double faa = (fa - 2 * f0 + fb) / (dth * dth);
                res = std::max(res, std::fabs(frr + fr / r0 + faa / (r0 * r0)));
            }
        }
        break;
    }
    }
    return res;
}

}  // namespace toric
