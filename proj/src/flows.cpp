#include "toric/flows.h"

#include <cmath>
#include <limits>
#include <ostream>

namespace toric {

namespace {

constexpr double NaN = std::numeric_limits<double>::quiet_NaN();

/// true if every node of the 3^m block around `flat` is valid
bool full_stencil(const PolytopeGrid& X, std::size_t flat)
{
    const TensorGrid& g = X.grid();
    if(!g.is_interior(flat, 1))
        return false;
    const int m = g.dim();
    const auto idx = g.multi(flat);
    int total = 1;
    for(int a = 0; a < m; a++)
        total *= 3;
    for(int c = 0; c < total; c++) {
        TensorGrid::Multi n = idx;
        int r = c;
        for(int a = 0; a < m; a++) {
            n[a] = n[a] + static_cast<std::size_t>(r % 3) - 1;
            r /= 3;
        }
        if(!X.valid(g.flat(n)))
            return false;
    }
    return true;
}

double max_spacing(const TensorGrid& g)
{
    double h = 0;
    for(int a = 0; a < g.dim(); a++)
        for(std::size_t i = 1; i < g.extent(a); i++)
            h = std::max(h, g.axis(a)[i] - g.axis(a)[i - 1]);
    return h;
}

/// tensor grid of the domain's nodes (interval or rectangle)
TensorGrid domain_grid(const DomainN& N)
{
    if(N.kind() == DomainKind::Interval)
        return TensorGrid({N.axis(0)});
    if(N.kind() == DomainKind::Rectangle)
        return TensorGrid({N.axis(0), N.axis(1)});
    throw std::invalid_argument("flows: the disc domain has no tensor layout; use an interval or a rectangle");
}

/// Discrete Laplacian in y of a field [y][x] at one interior y node, for all x.
void laplacian_y(const TensorGrid& yg, std::span<const double> u, std::size_t nx, std::size_t y, std::span<double> out)
{
    const auto idx = yg.multi(y);
    std::fill(out.begin(), out.end(), 0.0);
    for(int a = 0; a < yg.dim(); a++) {
        const auto& ax = yg.axis(a);
        const std::size_t i = idx[a], s = yg.stride(a);
        const double hm = ax[i] - ax[i - 1], hp = ax[i + 1] - ax[i];
        for(std::size_t x = 0; x < nx; x++)
            out[x] += fd_second(hm, hp, u[(y - s) * nx + x], u[y * nx + x], u[(y + s) * nx + x]);
    }
}

}  // namespace

// ---------------------------------------------------------------- flow state

FlowState::FlowState(DomainN N, PolytopeGrid X, const Initial& u) : N_(std::move(N)), X_(std::move(X))
{
    domain_grid(N_);
    u_.assign(N_.size() * X_.size(), NaN);
    for(std::size_t y = 0; y < N_.size(); y++) {
        const Vec yv = N_.node(y);
        for(std::size_t x = 0; x < X_.size(); x++)
            if(X_.valid(x))
                u_[y * X_.size() + x] = u(yv, X_.grid().node(x));
    }
    check_convexity();
}

SymplecticPotential FlowState::potential(std::size_t y) const
{
    const DelzantPolytope& P = X_.polytope();
    std::vector<double> f(X_.size(), NaN);
    for(std::size_t x = 0; x < X_.size(); x++)
        if(X_.valid(x))
            f[x] = value(y, x) - guillemin_jet(P, X_.grid().node(x)).value;
    return SymplecticPotential::sampled(X_, std::move(f));
}

double FlowState::max_step() const
{
    const TensorGrid yg = domain_grid(N_);
    double h = std::numeric_limits<double>::infinity();
    for(int a = 0; a < yg.dim(); a++)
        for(std::size_t i = 1; i < yg.extent(a); i++)
            h = std::min(h, yg.axis(a)[i] - yg.axis(a)[i - 1]);
    return h * h / (2.0 * yg.dim());
}

void FlowState::check_convexity()
{
    convex_.assign(N_.size(), 1);
    const TensorGrid& g = X_.grid();
    for(std::size_t y = 0; y < N_.size(); y++) {
        const auto s = slice(y);
        for(std::size_t x = 0; x < X_.size() && convex_[y]; x++)
            if(X_.valid(x) && full_stencil(X_, x) && !is_positive_definite(fd_hessian(g, s, x)))
                convex_[y] = 0;
        if(!convex_[y])
            losses_.push_back({tau_, y});
    }
}

FlowState heat_evolve(const FlowState& state, double dtau, int steps)
{
    if(!(dtau > 0) || steps < 0)
        throw std::invalid_argument("heat_evolve: need a positive step and a nonnegative step count");
    if(dtau > state.max_step() * (1 + 1e-12))
        throw std::invalid_argument("heat_evolve: step " + std::to_string(dtau) + " exceeds the stability limit "
            + std::to_string(state.max_step()));
    FlowState out = state;
    const TensorGrid yg = domain_grid(out.N_);
    const std::size_t nx = out.X_.size();
    std::vector<double> next = out.u_;
    std::vector<double> lap(nx);
    for(int step = 0; step < steps; step++) {
        for(std::size_t y = 0; y < out.N_.size(); y++) {
            if(out.N_.is_boundary(y))
                continue;
            laplacian_y(yg, out.u_, nx, y, lap);
            for(std::size_t x = 0; x < nx; x++)
                next[y * nx + x] = out.u_[y * nx + x] + dtau * lap[x];
        }
        std::swap(out.u_, next);
        out.tau_ += dtau;
    }
    out.check_convexity();
    return out;
}

void write_snapshot(std::ostream& os, const FlowState& state, std::size_t y)
{
    write_potential(os, state.potential(y), state.xgrid(), state.tau());
}

HarmonicFamily dual_family(const FlowState& state, const TensorGrid& rho)
{
    HarmonicFamily out{domain_grid(state.domain()), rho, {}};
    out.values.reserve(state.domain().size() * rho.size());
    for(std::size_t y = 0; y < state.domain().size(); y++) {
        const KahlerPotential phi = to_kahler(state.potential(y), rho);
        out.values.insert(out.values.end(), phi.values().begin(), phi.values().end());
    }
    return out;
}

// ---------------------------------------------------------------- residuals

namespace {

/// first derivative along y-axis a of Phi at (y, all rho)
std::vector<double> dy(const HarmonicFamily& f, std::size_t y, int a)
{
    const auto idx = f.y.multi(y);
    const auto& ax = f.y.axis(a);
    const std::size_t i = idx[a], s = f.y.stride(a), nr = f.rho.size();
    std::vector<double> out(nr);
    for(std::size_t r = 0; r < nr; r++)
        out[r] = fd_first(ax[i] - ax[i - 1], ax[i + 1] - ax[i], f.at(y - s, r), f.at(y, r), f.at(y + s, r));
    return out;
}

std::vector<double> d2y(const HarmonicFamily& f, std::size_t y, int a)
{
    const auto idx = f.y.multi(y);
    const auto& ax = f.y.axis(a);
    const std::size_t i = idx[a], s = f.y.stride(a), nr = f.rho.size();
    std::vector<double> out(nr);
    for(std::size_t r = 0; r < nr; r++)
        out[r] = fd_second(ax[i] - ax[i - 1], ax[i + 1] - ax[i], f.at(y - s, r), f.at(y, r), f.at(y + s, r));
    return out;
}

void check_family(const HarmonicFamily& f)
{
    if(f.values.size() != f.y.size() * f.rho.size())
        throw std::invalid_argument("harmonic family: value count differs from grid sizes");
}

/// y nodes whose 1-neighbours along every axis carry finite values for all rho
bool y_stencil_finite(const HarmonicFamily& f, std::size_t y, std::size_t r)
{
    if(!std::isfinite(f.at(y, r)))
        return false;
    for(int a = 0; a < f.y.dim(); a++) {
        const std::size_t s = f.y.stride(a);
        if(!std::isfinite(f.at(y - s, r)) || !std::isfinite(f.at(y + s, r)))
            return false;
    }
    return true;
}

ResidualReport summarize(const HarmonicFamily& f, std::span<const double> field)
{
    ResidualReport rep;
    double s = 0;
    for(double v : field)
        if(std::isfinite(v)) {
            rep.sup = std::max(rep.sup, std::fabs(v));
            s += std::fabs(v);
            rep.count++;
        }
    rep.mean = rep.count ? s / static_cast<double>(rep.count) : 0.0;
    rep.y_spacing = max_spacing(f.y);
    rep.rho_spacing = max_spacing(f.rho);
    return rep;
}

/// rho nodes at least two cells from the edge whose 3^m rho-stencil is finite
/// on slice y (and on its y-neighbours)
bool rho_stencil_ok(const HarmonicFamily& f, std::size_t y, std::size_t r)
{
    if(!f.rho.is_interior(r, 2))
        return false;
    const int m = f.rho.dim();
    const auto idx = f.rho.multi(r);
    int total = 1;
    for(int a = 0; a < m; a++)
        total *= 3;
    for(int c = 0; c < total; c++) {
        TensorGrid::Multi n = idx;
        int rem = c;
        for(int a = 0; a < m; a++) {
            n[a] = n[a] + static_cast<std::size_t>(rem % 3) - 1;
            rem /= 3;
        }
        if(!y_stencil_finite(f, y, f.rho.flat(n)))
            return false;
    }
    return true;
}

}  // namespace

std::vector<double> eells_sampson_field(const HarmonicFamily& f)
{
    check_family(f);
    const std::size_t nr = f.rho.size();
    std::vector<double> field(f.values.size(), NaN);
    std::vector<double> slice(nr);
    for(std::size_t y = 0; y < f.y.size(); y++) {
        if(!f.y.is_interior(y, 2))
            continue;
        bool any = false;
        for(std::size_t r = 0; r < nr && !any; r++)
            any = rho_stencil_ok(f, y, r);
        if(!any)
            continue;
        std::vector<std::vector<double>> first;
        std::vector<double> lap(nr, 0.0);
        for(int a = 0; a < f.y.dim(); a++) {
            first.push_back(dy(f, y, a));
            const auto second = d2y(f, y, a);
            for(std::size_t r = 0; r < nr; r++)
                lap[r] += second[r];
        }
        for(std::size_t r = 0; r < nr; r++)
            slice[r] = f.at(y, r);
        for(std::size_t r = 0; r < nr; r++) {
            if(!rho_stencil_ok(f, y, r))
                continue;
            const Mat H = fd_hessian(f.rho, slice, r);
            Eigen::FullPivLU<Mat> lu(H);
            if(!lu.isInvertible())
                throw NumericalError("eells_sampson_residual: singular rho-Hessian at y node " + std::to_string(y)
                    + ", rho node " + std::to_string(r));
            double corr = 0;
            for(const auto& fa : first) {
                const Vec g = fd_gradient(f.rho, fa, r);
                corr += g.dot(lu.solve(g));
            }
            field[y * nr + r] = lap[r] - corr;
        }
    }
    return field;
}

ResidualReport eells_sampson_residual(const HarmonicFamily& phi)
{
    return summarize(phi, eells_sampson_field(phi));
}

ResidualReport eells_sampson_residual(const HarmonicFamily& earlier, const HarmonicFamily& later, double dtau)
{
    check_family(later);
    if(!(earlier.y == later.y) || !(earlier.rho == later.rho))
        throw std::invalid_argument("eells_sampson_residual: snapshots live on different grids");
    if(!(dtau > 0))
        throw std::invalid_argument("eells_sampson_residual: time step must be positive");
    auto field = eells_sampson_field(earlier);
    for(std::size_t i = 0; i < field.size(); i++)
        if(std::isfinite(field[i]))
            field[i] = (later.values[i] - earlier.values[i]) / dtau - field[i];
    return summarize(earlier, field);
}

std::vector<double> hcma_field(const HarmonicFamily& f)
{
    check_family(f);
    if(f.rho.dim() != 1 || f.y.dim() != 2)
        throw std::invalid_argument("hcma_residual: needs a two-dimensional y grid and one rho axis");
    const std::size_t nr = f.rho.size();
    std::vector<double> field(f.values.size(), NaN);
    const auto& rax = f.rho.axis(0);
    for(std::size_t y = 0; y < f.y.size(); y++) {
        if(!f.y.is_interior(y, 2))
            continue;
        bool ok = true;
        for(std::size_t r = 0; r < nr && ok; r++)
            ok = y_stencil_finite(f, y, r);
        if(!ok)
            continue;
        const auto pq = dy(f, y, 0), ps = dy(f, y, 1);
        const auto pqq = d2y(f, y, 0), pss = d2y(f, y, 1);
        for(std::size_t r = 2; r + 2 < nr; r++) {
            const double hm = rax[r] - rax[r - 1], hp = rax[r + 1] - rax[r];
            const double prr = fd_second(hm, hp, f.at(y, r - 1), f.at(y, r), f.at(y, r + 1));
            const double pqr = fd_first(hm, hp, pq[r - 1], pq[r], pq[r + 1]);
            const double psr = fd_first(hm, hp, ps[r - 1], ps[r], ps[r + 1]);
            field[y * nr + r] = (pqq[r] + pss[r]) * prr - pqr * pqr - psr * psr;
        }
    }
    return field;
}

ResidualReport hcma_residual(const HarmonicFamily& f)
{
    ResidualReport rep = summarize(f, hcma_field(f));
    const auto& rax = f.rho.axis(0);
    const std::size_t nr = f.rho.size();
    for(std::size_t y = 0; y < f.y.size(); y++)
        for(std::size_t r = 1; r + 1 < nr; r++) {
            const double a = f.at(y, r - 1), b = f.at(y, r), c = f.at(y, r + 1);
            if(!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
                continue;
            if(!(fd_second(rax[r] - rax[r - 1], rax[r + 1] - rax[r], a, b, c) > 0))
                rep.positivity_violations++;
        }
    return rep;
}

}  // namespace toric
