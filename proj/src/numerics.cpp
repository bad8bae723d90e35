#include "toric/numerics.h"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace toric {

Vec to_vec(std::span<const double> x)
{
    if(x.size() > static_cast<std::size_t>(MAX_DIM))
        throw std::invalid_argument("dimension exceeds MAX_DIM");
    Vec v(static_cast<int>(x.size()));
    for(std::size_t i = 0; i < x.size(); i++)
        v[static_cast<int>(i)] = x[i];
    return v;
}

double log_sum_exp(std::span<const double> terms)
{
    LogSumExp acc;
    for(double t : terms)
        acc.add(t);
    return acc.result();
}

void LogSumExp::add(double term)
{
    if(term == -std::numeric_limits<double>::infinity())
        return;
    if(term <= max_) {
        sum_ += std::exp(term - max_);
    } else {
        sum_ = sum_ * std::exp(max_ - term) + 1.0;
        max_ = term;
    }
}

double LogSumExp::result() const
{
    if(sum_ == 0)
        return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
}

namespace {

// Legendre polynomial P_n and its derivative at x
void legendre(int order, double x, double& p, double& dp)
{
    double p0 = 1, p1 = x;
    for(int n = 2; n <= order; n++) {
        const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
        p0 = p1;
        p1 = p2;
    }
    p = order == 0 ? 1.0 : p1;
    dp = order * (x * p - (order == 1 ? 1.0 : p0)) / (x * x - 1);
}

}  // namespace

GaussRule gauss_legendre(int order)
{
    if(order < 1)
        throw std::invalid_argument("gauss_legendre: order must be positive");
    GaussRule rule;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    if(order == 1) {
        rule.weights[0] = 2;
        return rule;
    }
    const int half = (order + 1) / 2;
    for(int i = 0; i < half; i++) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double p, dp;
        for(int iter = 0; iter < 100; iter++) {
            legendre(order, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if(std::fabs(dx) < 1e-16)
                break;
        }
        legendre(order, x, p, dp);
        const double w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = rule.weights[order - 1 - i] = w;
    }
    if(order % 2 == 1)
        rule.nodes[order / 2] = 0;
    return rule;
}

GaussRule composite_rule(double a, double b, int panels, int order,
    std::span<const double> breakpoints)
{
    if(!(b > a) || panels < 1)
        throw std::invalid_argument("composite_rule: empty interval or no panels");
    std::vector<double> cuts{a};
    for(double c : breakpoints)
        if(c > a && c < b)
            cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const GaussRule base = gauss_legendre(order);
    GaussRule rule;
    rule.nodes.reserve((cuts.size() - 1) * panels * order);
    rule.weights.reserve(rule.nodes.capacity());
    for(std::size_t piece = 0; piece + 1 < cuts.size(); piece++) {
        const double width = (cuts[piece + 1] - cuts[piece]) / panels;
        for(int p = 0; p < panels; p++) {
            const double lo = cuts[piece] + p * width;
            for(int q = 0; q < order; q++) {
                rule.nodes.push_back(lo + 0.5 * width * (base.nodes[q] + 1));
                rule.weights.push_back(0.5 * width * base.weights[q]);
            }
        }
    }
    return rule;
}

void require_increasing(std::span<const double> v, const std::string& what)
{
    for(std::size_t i = 1; i < v.size(); i++)
        if(!(v[i] > v[i - 1]))
            throw std::invalid_argument(what + ": samples must be strictly increasing");
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> out(n);
    if(n == 1) {
        out[0] = a;
        return out;
    }
    for(std::size_t i = 0; i < n; i++)
        out[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

double fd_first(double hm, double hp, double fm, double f0, double fp)
{
    return (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hm * hp * (hm + hp));
}

double fd_second(double hm, double hp, double fm, double f0, double fp)
{
    return 2 * (hm * fp - (hm + hp) * f0 + hp * fm) / (hm * hp * (hm + hp));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if(n < 2 || y.size() != n)
        throw std::invalid_argument("fit_line: need at least two paired samples");
    double mx = 0, my = 0;
    for(std::size_t i = 0; i < n; i++) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for(std::size_t i = 0; i < n; i++) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if(sxx == 0)
        throw std::invalid_argument("fit_line: degenerate abscissae");
    const double slope = sxy / sxx;
    const double r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
    return {my - slope * mx, slope, r2};
}

// ---------------------------------------------------------------- splines

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y))
{
    const std::size_t n = x_.size();
    if(n < 2 || y_.size() != n)
        throw std::invalid_argument("CubicSpline: need at least two nodes with matching values");
    require_increasing(x_, "CubicSpline");
    m_.assign(n, 0.0);
    if(n == 2)
        return;
    if(n == 3) {
        // not-a-knot through three points is the interpolating parabola
        const double d0 = (y_[1] - y_[0]) / (x_[1] - x_[0]);
        const double d1 = (y_[2] - y_[1]) / (x_[2] - x_[1]);
        m_.assign(3, 2 * (d1 - d0) / (x_[2] - x_[0]));
        return;
    }
    const auto N = static_cast<int>(n);
    std::vector<double> h(n - 1);
    for(int i = 0; i + 1 < N; i++)
        h[i] = x_[i + 1] - x_[i];

    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> entries;
    entries.reserve(3 * n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
    entries.emplace_back(0, 0, h[1]);
    entries.emplace_back(0, 1, -(h[0] + h[1]));
    entries.emplace_back(0, 2, h[0]);
    for(int i = 1; i + 1 < N; i++) {
        entries.emplace_back(i, i - 1, h[i - 1]);
        entries.emplace_back(i, i, 2 * (h[i - 1] + h[i]));
        entries.emplace_back(i, i + 1, h[i]);
        rhs[i] = 6 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    entries.emplace_back(N - 1, N - 3, h[N - 2]);
    entries.emplace_back(N - 1, N - 2, -(h[N - 3] + h[N - 2]));
    entries.emplace_back(N - 1, N - 1, h[N - 3]);
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if(lu.info() != Eigen::Success)
        throw NumericalError("CubicSpline: singular end-condition system");
    const Eigen::VectorXd sol = lu.solve(rhs);
    for(int i = 0; i < N; i++)
        m_[i] = sol[i];
}

std::size_t CubicSpline::segment(double x) const
{
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

void CubicSpline::eval(double x, double& val, double& der, double& der2) const
{
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double a = x_[i + 1] - x, b = x - x_[i];
    const double ca = y_[i] / h - m_[i] * h / 6, cb = y_[i + 1] / h - m_[i + 1] * h / 6;
    val = (m_[i] * a * a * a + m_[i + 1] * b * b * b) / (6 * h) + ca * a + cb * b;
    der = (-m_[i] * a * a + m_[i + 1] * b * b) / (2 * h) - ca + cb;
    der2 = (m_[i] * a + m_[i + 1] * b) / h;
}

double CubicSpline::operator()(double x) const
{
    double v, d, d2;
    eval(x, v, d, d2);
    return v;
}

namespace {

// Hermite basis on [0,1]: (value, d/dt, d2/dt2) for h00, h10, h01, h11
struct Basis { double v, d, dd; };
void hermite(double t, Basis out[4])
{
    const double t2 = t * t, t3 = t2 * t;
    out[0] = {2 * t3 - 3 * t2 + 1, 6 * t2 - 6 * t, 12 * t - 6};
    out[1] = {t3 - 2 * t2 + t, 3 * t2 - 4 * t + 1, 6 * t - 4};
    out[2] = {-2 * t3 + 3 * t2, -6 * t2 + 6 * t, -12 * t + 6};
    out[3] = {t3 - t2, 3 * t2 - 2 * t, 6 * t - 2};
}

std::size_t cell(const std::vector<double>& grid, double x)
{
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
    return std::min(i, grid.size() - 2);
}

}  // namespace

BicubicSurface::BicubicSurface(std::vector<double> x, std::vector<double> y, std::vector<double> values)
    : x_(std::move(x)), y_(std::move(y)), f_(std::move(values))
{
    const std::size_t nx = x_.size(), ny = y_.size();
    if(nx < 2 || ny < 2 || f_.size() != nx * ny)
        throw std::invalid_argument("BicubicSurface: grid/value size mismatch");
    fx_.assign(nx * ny, 0);
    fy_.assign(nx * ny, 0);
    fxy_.assign(nx * ny, 0);
    double v, d, d2;
    for(std::size_t i = 0; i < nx; i++) {
        std::vector<double> row(f_.begin() + i * ny, f_.begin() + (i + 1) * ny);
        CubicSpline s(y_, row);
        for(std::size_t j = 0; j < ny; j++) {
            s.eval(y_[j], v, d, d2);
            fy_[i * ny + j] = d;
        }
    }
    for(std::size_t j = 0; j < ny; j++) {
        std::vector<double> col(nx), colY(nx);
        for(std::size_t i = 0; i < nx; i++) {
            col[i] = f_[i * ny + j];
            colY[i] = fy_[i * ny + j];
        }
        CubicSpline s(x_, col), sY(x_, colY);
        for(std::size_t i = 0; i < nx; i++) {
            s.eval(x_[i], v, d, d2);
            fx_[i * ny + j] = d;
            sY.eval(x_[i], v, d, d2);
            fxy_[i * ny + j] = d;
        }
    }
}

Jet BicubicSurface::jet(double px, double py) const
{
    const std::size_t ny = y_.size();
    const std::size_t i = cell(x_, px), j = cell(y_, py);
    const double dx = x_[i + 1] - x_[i], dy = y_[j + 1] - y_[j];
    Basis bt[4], bs[4];
    hermite((px - x_[i]) / dx, bt);
    hermite((py - y_[j]) / dy, bs);
    Jet out = Jet::zero(2);
    for(int ci = 0; ci < 2; ci++)
        for(int cj = 0; cj < 2; cj++) {
            const std::size_t idx = (i + ci) * ny + (j + cj);
            const Basis& t0 = bt[ci == 0 ? 0 : 2];
            const Basis& t1 = bt[ci == 0 ? 1 : 3];
            const Basis& s0 = bs[cj == 0 ? 0 : 2];
            const Basis& s1 = bs[cj == 0 ? 1 : 3];
            // Hermite data at this corner: f, fx*dx, fy*dy, fxy*dx*dy
            const double c[4] = {f_[idx], fx_[idx] * dx, fy_[idx] * dy, fxy_[idx] * dx * dy};
            const Basis* T[4] = {&t0, &t1, &t0, &t1};
            const Basis* S[4] = {&s0, &s0, &s1, &s1};
            for(int q = 0; q < 4; q++) {
                out.value += c[q] * T[q]->v * S[q]->v;
                out.grad[0] += c[q] * T[q]->d * S[q]->v / dx;
                out.grad[1] += c[q] * T[q]->v * S[q]->d / dy;
                out.hess(0, 0) += c[q] * T[q]->dd * S[q]->v / (dx * dx);
                out.hess(1, 1) += c[q] * T[q]->v * S[q]->dd / (dy * dy);
                out.hess(0, 1) += c[q] * T[q]->d * S[q]->d / (dx * dy);
            }
        }
    out.hess(1, 0) = out.hess(0, 1);
    return out;
}

}  // namespace toric
