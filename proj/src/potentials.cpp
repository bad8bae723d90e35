#include "toric/potentials.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace toric {

namespace {

std::string format_vec(const Vec& v)
{
    std::ostringstream os;
    os << std::setprecision(10) << "(";
    for(int i = 0; i < v.size(); i++)
        os << (i ? ", " : "") << v[i];
    os << ")";
    return os.str();
}

/// log(1+e^t) and its derivatives without overflow
Jet softplus(double t)
{
    Jet j = Jet::zero(1);
    j.value = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    const double s = t > 0 ? 1 / (1 + std::exp(-t)) : std::exp(t) / (1 + std::exp(t));
    j.grad[0] = s;
    j.hess(0, 0) = s * (1 - s);
    return j;
}

/// Safeguarded Newton for an increasing scalar function g on the bracket
/// (lo, hi) with g(lo) < 0 < g(hi). Returns the root.
template<typename Fn>
double bracketed_newton(Fn&& g_and_slope, double lo, double hi, double start,
    const LegendreOptions& opt, double scale, const char* what)
{
    double x = std::clamp(start, lo, hi);
    if(!(x > lo && x < hi))
        x = 0.5 * (lo + hi);
    for(int iter = 0; iter < opt.max_iterations; iter++) {
        double g, slope;
        g_and_slope(x, g, slope);
        if(std::fabs(g) <= opt.tolerance * scale)
            return x;
        if(g < 0)
            lo = x;
        else
            hi = x;
        double next = x - g / slope;
        if(!(slope > 0) || !(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if(std::fabs(next - x) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(x)))
            return next;
        x = next;
    }
    throw NumericalError(std::string(what) + ": Newton iteration did not converge");
}

/// Damped Newton minimisation of a convex F with gradient jet.grad - target,
/// keeping iterates inside the region accepted by `feasible`.
template<typename JetFn, typename Feasible>
Vec damped_newton(JetFn&& jet_at, Feasible&& feasible, const Vec& target, Vec x,
    const LegendreOptions& opt, const char* what)
{
    const double scale = std::max(1.0, target.cwiseAbs().maxCoeff());
    for(int iter = 0; iter < opt.max_iterations; iter++) {
        const Jet j = jet_at(x);
        const Vec g = j.grad - target;
        if(g.cwiseAbs().maxCoeff() <= opt.tolerance * scale)
            return x;
        Eigen::LLT<Mat> llt(j.hess);
        if(llt.info() != Eigen::Success)
            throw NumericalError(std::string(what) + ": Hessian not positive definite at " + format_vec(x));
        const Vec d = -llt.solve(g);
        const double F0 = j.value - target.dot(x);
        const double slope = g.dot(d);
        double t = 1;
        bool accepted = false;
        while(t > 1e-20) {
            const Vec trial = x + t * d;
            if(feasible(trial)) {
                const double F1 = jet_at(trial).value - target.dot(trial);
                if(F1 <= F0 + 1e-4 * t * slope + 1e-14 * (1 + std::fabs(F0))) {
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if(!accepted)
            break;
        const Vec step = t * d;
        x += step;
        if(step.cwiseAbs().maxCoeff() <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, x.cwiseAbs().maxCoeff()))
            return x;
    }
    throw NumericalError(std::string(what) + ": Newton iteration did not converge near " + format_vec(x));
}

// ------------------------------------------------------------ basis functions

class FacetProduct final : public BasisFunction {
public:
    explicit FacetProduct(const DelzantPolytope& P) : P_(P) {}
    Jet jet(const Vec& x) const override
    {
        const int m = P_.dim();
        const std::size_t d = P_.num_facets();
        std::vector<double> l(d);
        for(std::size_t r = 0; r < d; r++)
            l[r] = P_.facet_value(r, x);
        auto normal = [&](std::size_t r) {
            Vec v(m);
            for(int i = 0; i < m; i++)
                v[i] = static_cast<double>(P_.facet(r).normal[i]);
            return v;
        };
        // products over all facets except r (and except r, s)
        auto prod_except = [&](std::size_t r, std::size_t s) {
            double p = 1;
            for(std::size_t t = 0; t < d; t++)
                if(t != r && t != s)
                    p *= l[t];
            return p;
        };
        Jet out = Jet::zero(m);
        out.value = prod_except(d, d);
        for(std::size_t r = 0; r < d; r++) {
            const Vec vr = normal(r);
            out.grad += prod_except(r, r) * vr;
            for(std::size_t s = 0; s < d; s++)
                if(s != r)
                    out.hess += prod_except(r, s) * vr * normal(s).transpose();
        }
        return out;
    }
    std::string describe() const override { return "prod_r l_r"; }
private:
    DelzantPolytope P_;
};

class CustomBasis final : public BasisFunction {
public:
    CustomBasis(std::function<Jet(const Vec&)> fn, std::string name) : fn_(std::move(fn)), name_(std::move(name)) {}
    Jet jet(const Vec& x) const override { return fn_(x); }
    std::string describe() const override { return name_; }
private:
    std::function<Jet(const Vec&)> fn_;
    std::string name_;
};

class SampledBasis final : public BasisFunction {
public:
    SampledBasis(const PolytopeGrid& grid, std::vector<double> values) : dim_(grid.grid().dim())
    {
        const TensorGrid& g = grid.grid();
        if(values.size() != g.size())
            throw std::invalid_argument("sampled_basis: value count differs from grid size");
        if(dim_ == 1) {
            std::vector<double> xs, ys;
            for(std::size_t i = 0; i < g.size(); i++)
                if(grid.valid(i)) {
                    xs.push_back(g.axis(0)[i]);
                    ys.push_back(values[i]);
                }
            spline_ = CubicSpline(std::move(xs), std::move(ys));
        } else if(dim_ == 2) {
            if(!grid.all_valid())
                throw std::invalid_argument("sampled_basis: dimension 2 needs a grid with all nodes valid");
            surface_ = BicubicSurface(g.axis(0), g.axis(1), std::move(values));
        } else {
            throw std::invalid_argument("sampled_basis: only dimensions 1 and 2 are supported");
        }
    }
    Jet jet(const Vec& x) const override
    {
        if(dim_ == 2)
            return surface_.jet(x[0], x[1]);
        Jet j = Jet::zero(1);
        spline_.eval(x[0], j.value, j.grad[0], j.hess(0, 0));
        return j;
    }
    std::string describe() const override { return "sampled"; }
private:
    int dim_;
    CubicSpline spline_;
    BicubicSurface surface_;
};

}  // namespace

// ---------------------------------------------------------------- grids

PolytopeGrid::PolytopeGrid(const DelzantPolytope& P, TensorGrid grid, double margin)
    : P_(P), grid_(std::move(grid)), margin_(margin)
{
    if(grid_.dim() != P.dim())
        throw std::invalid_argument("PolytopeGrid: grid dimension differs from polytope");
    if(margin < 0)
        throw std::invalid_argument("PolytopeGrid: negative margin");
    const std::size_t n = grid_.size();
    valid_.assign(n, 0);
    adjacent_.assign(n, 0);
    for(std::size_t i = 0; i < n; i++) {
        const Vec x = grid_.node(i);
        const double l = P.min_facet_value(as_span(x));
        valid_[i] = l > 0 && l >= margin;
    }
    for(std::size_t i = 0; i < n; i++) {
        if(!valid_[i])
            continue;
        const auto idx = grid_.multi(i);
        for(int a = 0; a < grid_.dim(); a++) {
            const std::size_t s = grid_.stride(a);
            if(idx[a] == 0 || idx[a] + 1 == grid_.extent(a) || !valid_[i - s] || !valid_[i + s])
                adjacent_[i] = 1;
        }
    }
}

PolytopeGrid PolytopeGrid::uniform(const DelzantPolytope& P, std::size_t n, double margin)
{
    std::vector<std::vector<double>> axes;
    for(int a = 0; a < P.dim(); a++)
        axes.push_back(linspace(P.lower_corner()[a] + margin, P.upper_corner()[a] - margin, n));
    return PolytopeGrid(P, TensorGrid(std::move(axes)), margin);
}

bool PolytopeGrid::all_valid() const
{
    return std::all_of(valid_.begin(), valid_.end(), [](char c) { return c != 0; });
}

double boundary_margin(int max_level)
{
    if(max_level < 1)
        throw std::invalid_argument("boundary_margin: level must be positive");
    return 1.0 / (4.0 * max_level);
}

std::shared_ptr<const BasisFunction> facet_product(const DelzantPolytope& P)
{
    return std::make_shared<FacetProduct>(P);
}

std::shared_ptr<const BasisFunction> custom_basis(std::function<Jet(const Vec&)> fn, std::string name)
{
    return std::make_shared<CustomBasis>(std::move(fn), std::move(name));
}

std::shared_ptr<const BasisFunction> sampled_basis(const PolytopeGrid& grid, std::vector<double> values)
{
    return std::make_shared<SampledBasis>(grid, std::move(values));
}

// ---------------------------------------------------------------- Kähler

KahlerPotential KahlerPotential::closed_form(int dim, Evaluator fn, std::string name)
{
    KahlerPotential p;
    p.dim_ = dim;
    p.closed_ = std::move(fn);
    p.name_ = std::move(name);
    return p;
}

KahlerPotential KahlerPotential::sampled(RadialGrid grid, std::vector<double> values, std::string name)
{
    if(values.size() != grid.size())
        throw std::invalid_argument("KahlerPotential: value count differs from grid size");
    KahlerPotential p;
    p.dim_ = grid.dim();
    p.name_ = std::move(name);
    if(p.dim_ == 1)
        p.spline_ = std::make_shared<CubicSpline>(grid.axis(0), values);
    else if(p.dim_ == 2)
        p.surface_ = std::make_shared<BicubicSurface>(grid.axis(0), grid.axis(1), values);
    else
        throw std::invalid_argument("KahlerPotential: sampled potentials support dimensions 1 and 2");
    p.grid_ = std::move(grid);
    p.values_ = std::move(values);
    return p;
}

KahlerPotential KahlerPotential::fubini_study()
{
    return closed_form(1, [](const Vec& rho) { return softplus(rho[0]); }, "fubini-study");
}

KahlerPotential KahlerPotential::quadratic(int dim)
{
    return closed_form(dim, [dim](const Vec& rho) {
        return Jet{0.5 * rho.squaredNorm(), rho, Mat::Identity(dim, dim)};
    }, "quadratic");
}

const RadialGrid& KahlerPotential::grid() const
{
    if(!grid_)
        throw std::logic_error("KahlerPotential '" + name_ + "' has no sample grid");
    return *grid_;
}

Jet KahlerPotential::jet(const Vec& rho) const
{
    if(rho.size() != dim_)
        throw std::invalid_argument("KahlerPotential: point dimension mismatch");
    if(closed_)
        return closed_(rho);
    if(dim_ == 1) {
        Jet j = Jet::zero(1);
        spline_->eval(rho[0], j.value, j.grad[0], j.hess(0, 0));
        return j;
    }
    return surface_->jet(rho[0], rho[1]);
}

double KahlerPotential::value(double rho) const
{
    Vec r(1);
    r[0] = rho;
    return value(r);
}

bool KahlerPotential::in_domain(const Vec& rho) const
{
    return closed_ ? true : grid_->contains(rho);
}

KahlerPotential KahlerPotential::shifted(double c) const
{
    KahlerPotential p = *this;
    if(closed_) {
        p.closed_ = [fn = closed_, c](const Vec& rho) {
            Jet j = fn(rho);
            j.value += c;
            return j;
        };
    } else {
        for(double& v : p.values_)
            v += c;
        if(dim_ == 1)
            p.spline_ = std::make_shared<CubicSpline>(p.grid_->axis(0), p.values_);
        else
            p.surface_ = std::make_shared<BicubicSurface>(p.grid_->axis(0), p.grid_->axis(1), p.values_);
    }
    return p;
}

std::vector<std::size_t> KahlerPotential::convexity_failures() const
{
    std::vector<std::size_t> bad;
    if(!grid_)
        return bad;
    for(std::size_t i = 0; i < grid_->size(); i++)
        if(grid_->is_interior(i, 1) && !is_positive_definite(fd_hessian(*grid_, values_, i)))
            bad.push_back(i);
    return bad;
}

// ---------------------------------------------------------------- symplectic

SymplecticPotential::SymplecticPotential(DelzantPolytope P, double singular_scale)
    : P_(std::move(P)), singular_(singular_scale)
{
}

SymplecticPotential SymplecticPotential::guillemin(const DelzantPolytope& P)
{
    return SymplecticPotential(P, 1.0);
}

SymplecticPotential SymplecticPotential::perturbed(const DelzantPolytope& P, double a)
{
    return guillemin(P).with_term(a, facet_product(P));
}

SymplecticPotential SymplecticPotential::sampled(const PolytopeGrid& grid, std::vector<double> f, double singular_scale)
{
    return SymplecticPotential(grid.polytope(), singular_scale).with_term(1.0, sampled_basis(grid, std::move(f)));
}

SymplecticPotential SymplecticPotential::with_term(double coef, std::shared_ptr<const BasisFunction> basis) const
{
    SymplecticPotential out = *this;
    for(auto& t : out.terms_)
        if(t.basis == basis) {
            t.coef += coef;
            return out;
        }
    out.terms_.push_back({coef, std::move(basis)});
    return out;
}

SymplecticPotential SymplecticPotential::shifted(double c) const
{
    SymplecticPotential out = *this;
    out.constant_ += c;
    return out;
}

SymplecticPotential SymplecticPotential::combination(std::span<const double> weights,
    std::span<const SymplecticPotential> potentials)
{
    if(weights.size() != potentials.size() || potentials.empty())
        throw std::invalid_argument("SymplecticPotential::combination: size mismatch");
    SymplecticPotential out(potentials.front().P_, 0.0);
    for(std::size_t q = 0; q < potentials.size(); q++) {
        const auto& u = potentials[q];
        if(u.dim() != out.dim() || u.P_.num_facets() != out.P_.num_facets())
            throw std::invalid_argument("SymplecticPotential::combination: different polytopes");
        out.singular_ += weights[q] * u.singular_;
        out.constant_ += weights[q] * u.constant_;
        for(const auto& t : u.terms_)
            out = out.with_term(weights[q] * t.coef, t.basis);
    }
    return out;
}

Jet SymplecticPotential::smooth_jet(const Vec& x) const
{
    Jet j = Jet::zero(dim());
    j.value = constant_;
    for(const auto& t : terms_) {
        Jet b = t.basis->jet(x);
        b *= t.coef;
        j += b;
    }
    return j;
}

Jet SymplecticPotential::jet(const Vec& x) const
{
    if(x.size() != dim())
        throw std::invalid_argument("SymplecticPotential: point dimension mismatch");
    Jet j = smooth_jet(x);
    if(singular_ != 0) {
        Jet s = guillemin_jet(P_, x);
        s *= singular_;
        j += s;
    }
    return j;
}

double SymplecticPotential::value(double x) const
{
    Vec v(1);
    v[0] = x;
    return value(v);
}

double guillemin_potential(const DelzantPolytope& P, std::span<const double> x)
{
    double s = 0;
    for(std::size_t r = 0; r < P.num_facets(); r++) {
        const double l = P.facet_value(r, x);
        if(!(l > 0))
            throw std::domain_error("guillemin_potential: point is not interior to the polytope");
        s += l * std::log(l);
    }
    return s;
}

Jet guillemin_jet(const DelzantPolytope& P, const Vec& x)
{
    const int m = P.dim();
    Jet j = Jet::zero(m);
    for(std::size_t r = 0; r < P.num_facets(); r++) {
        const double l = P.facet_value(r, x);
        if(!(l > 0))
            throw std::domain_error("guillemin potential: point " + format_vec(x) + " is not interior");
        Vec v(m);
        for(int i = 0; i < m; i++)
            v[i] = static_cast<double>(P.facet(r).normal[i]);
        const double lg = std::log(l);
        j.value += l * lg;
        j.grad += (lg + 1) * v;
        j.hess += (v * v.transpose()) / l;
    }
    return j;
}

// ---------------------------------------------------------------- Legendre

Vec invert_moment_map(const KahlerPotential& phi, const Vec& x, const Vec* guess, const LegendreOptions& opt)
{
    const int m = phi.dim();
    if(x.size() != m)
        throw std::invalid_argument("invert_moment_map: dimension mismatch");
    if(m == 1) {
        auto g = [&](double r, double& val, double& slope) {
            Vec v(1);
            v[0] = r;
            const Jet j = phi.jet(v);
            val = j.grad[0] - x[0];
            slope = j.hess(0, 0);
        };
        double lo, hi, glo, ghi, s;
        if(phi.has_grid()) {
            lo = phi.grid().axis(0).front();
            hi = phi.grid().axis(0).back();
            g(lo, glo, s);
            g(hi, ghi, s);
            if(glo > 0 || ghi < 0)
                throw NumericalError("invert_moment_map: x = " + format_vec(x) + " lies outside the moment image of the grid");
        } else {
            lo = -1;
            hi = 1;
            g(lo, glo, s);
            g(hi, ghi, s);
            while((glo > 0 || ghi < 0) && hi < 1e4) {
                if(glo > 0) { lo *= 2; g(lo, glo, s); }
                if(ghi < 0) { hi *= 2; g(hi, ghi, s); }
            }
            if(glo > 0 || ghi < 0)
                throw NumericalError("invert_moment_map: x = " + format_vec(x) + " lies outside the moment image");
        }
        if(glo == 0)
            return Vec::Constant(1, lo);
        if(ghi == 0)
            return Vec::Constant(1, hi);
        const double start = guess ? (*guess)[0] : 0.5 * (lo + hi);
        Vec out(1);
        out[0] = bracketed_newton(g, lo, hi, start, opt, 1.0, "invert_moment_map");
        return out;
    }
    auto feasible = [&](const Vec& r) { return phi.in_domain(r); };
    Vec start = guess ? *guess : Vec(Vec::Zero(m));
    if(phi.has_grid() && !phi.grid().contains(start)) {
        start = Vec(m);
        for(int a = 0; a < m; a++)
            start[a] = 0.5 * (phi.grid().axis(a).front() + phi.grid().axis(a).back());
    }
    return damped_newton([&](const Vec& r) { return phi.jet(r); }, feasible, x, start, opt, "invert_moment_map");
}

Vec invert_symplectic_gradient(const SymplecticPotential& u, const Vec& rho, const Vec* guess, const LegendreOptions& opt)
{
    const DelzantPolytope& P = u.polytope();
    const int m = P.dim();
    if(rho.size() != m)
        throw std::invalid_argument("invert_symplectic_gradient: dimension mismatch");
    const bool singular = u.singular_scale() > 0;
    if(m == 1) {
        auto g = [&](double x, double& val, double& slope) {
            Vec v(1);
            v[0] = x;
            const Jet j = u.jet(v);
            val = j.grad[0] - rho[0];
            slope = j.hess(0, 0);
        };
        const double lo = P.lower_corner()[0], hi = P.upper_corner()[0];
        if(!singular) {
            double glo, ghi, s;
            g(lo, glo, s);
            g(hi, ghi, s);
            if(glo > 0 || ghi < 0)
                throw NumericalError("invert_symplectic_gradient: rho = " + format_vec(rho) + " outside the range of grad u");
        }
        const double start = guess ? (*guess)[0] : 0.5 * (lo + hi);
        Vec out(1);
        out[0] = bracketed_newton(g, lo, hi, start, opt, std::max(1.0, std::fabs(rho[0])), "invert_symplectic_gradient");
        return out;
    }
    auto feasible = [&](const Vec& x) { return P.min_facet_value(as_span(x)) > (singular ? 0.0 : -1e-300); };
    Vec start = guess ? *guess : P.center();
    if(!feasible(start))
        start = P.center();
    return damped_newton([&](const Vec& x) { return u.jet(x); }, feasible, rho, start, opt, "invert_symplectic_gradient");
}

SymplecticPotential to_symplectic(const KahlerPotential& phi, const PolytopeGrid& grid, double singular_scale,
    const LegendreOptions& opt)
{
    const DelzantPolytope& P = grid.polytope();
    if(phi.dim() != P.dim())
        throw std::invalid_argument("to_symplectic: potential and polytope dimensions differ");
    const TensorGrid& g = grid.grid();
    std::vector<double> f(g.size(), std::numeric_limits<double>::quiet_NaN());
    Vec prev;
    bool have_prev = false;
    for(std::size_t i = 0; i < g.size(); i++) {
        if(!grid.valid(i))
            continue;
        const Vec x = g.node(i);
        Vec rho;
        try {
            rho = invert_moment_map(phi, x, have_prev ? &prev : nullptr, opt);
        } catch(const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " [to_symplectic node " + std::to_string(i) + "]");
        }
        const double u = x.dot(rho) - phi.value(rho);
        f[i] = singular_scale != 0 ? u - singular_scale * guillemin_jet(P, x).value : u;
        prev = rho;
        have_prev = true;
    }
    return SymplecticPotential::sampled(grid, std::move(f), singular_scale);
}

KahlerPotential to_kahler(const SymplecticPotential& u, const RadialGrid& grid, const LegendreOptions& opt)
{
    if(grid.dim() != u.dim())
        throw std::invalid_argument("to_kahler: grid dimension differs from potential");
    std::vector<double> values(grid.size());
    Vec prev;
    bool have_prev = false;
    for(std::size_t i = 0; i < grid.size(); i++) {
        const Vec rho = grid.node(i);
        Vec x;
        try {
            x = invert_symplectic_gradient(u, rho, have_prev ? &prev : nullptr, opt);
        } catch(const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " [to_kahler node " + std::to_string(i) + "]");
        }
        values[i] = x.dot(rho) - u.value(x);
        prev = x;
        have_prev = true;
    }
    return KahlerPotential::sampled(grid, std::move(values), "to_kahler");
}

KahlerPotential legendre_dual(const SymplecticPotential& u, const LegendreOptions& opt)
{
    return KahlerPotential::closed_form(u.dim(), [u, opt](const Vec& rho) {
        const Vec x = invert_symplectic_gradient(u, rho, nullptr, opt);
        const Jet j = u.jet(x);
        return Jet{x.dot(rho) - j.value, x, j.hess.inverse()};
    }, "legendre-dual");
}

Vec moment_map(const KahlerPotential& phi, const Vec& rho)
{
    if(!phi.in_domain(rho))
        throw std::invalid_argument("moment_map: rho outside the potential's grid");
    return phi.jet(rho).grad;
}

double abreu_delta(const SymplecticPotential& u, const Vec& x)
{
    const Jet j = u.jet(x);
    if(!is_positive_definite(j.hess))
        throw NumericalError("abreu_delta: Hessian of u is not positive definite at " + format_vec(x));
    double prod = 1;
    for(std::size_t r = 0; r < u.polytope().num_facets(); r++)
        prod *= u.polytope().facet_value(r, x);
    return 1.0 / (j.hess.determinant() * prod);
}

SymplecticPotential symplectic_preset(const std::string& name, const DelzantPolytope& P)
{
    if(name == "guillemin" || name == "fubini-study")
        return SymplecticPotential::guillemin(P);
    if(name.rfind("perturbed(", 0) == 0 && name.back() == ')') {
        const std::string arg = name.substr(10, name.size() - 11);
        std::size_t used = 0;
        double a = 0;
        try {
            a = std::stod(arg, &used);
        } catch(const std::logic_error&) {
            used = 0;
        }
        if(used != arg.size() || arg.empty())
            throw std::invalid_argument("symplectic_preset: bad parameter in '" + name + "'");
        return SymplecticPotential::perturbed(P, a);
    }
    throw std::invalid_argument("unknown potential preset '" + name + "'");
}

// ---------------------------------------------------------------- text format

namespace {

const char* const MAGIC = "toric-potential 1";

void write_axes(std::ostream& os, const TensorGrid& g)
{
    for(int a = 0; a < g.dim(); a++) {
        os << "axis " << g.extent(a);
        for(double v : g.axis(a))
            os << ' ' << v;
        os << '\n';
    }
}

void write_values(std::ostream& os, std::span<const double> values)
{
    os << "values " << values.size() << '\n';
    for(double v : values)
        os << v << '\n';
}

}  // namespace

void write_potential(std::ostream& os, const KahlerPotential& phi, std::optional<double> tau)
{
    const auto old = os.precision(17);
    os << MAGIC << '\n' << "kind kahler\n" << "dim " << phi.dim() << '\n';
    if(tau)
        os << "tau " << *tau << '\n';
    const RadialGrid& grid = phi.grid();
    write_axes(os, grid);
    if(phi.has_closed_form()) {
        std::vector<double> v(grid.size());
        for(std::size_t i = 0; i < grid.size(); i++)
            v[i] = phi.value(grid.node(i));
        write_values(os, v);
    } else {
        write_values(os, phi.values());
    }
    os.precision(old);
}

void write_potential(std::ostream& os, const SymplecticPotential& u, const PolytopeGrid& grid, std::optional<double> tau)
{
    const auto old = os.precision(17);
    os << MAGIC << '\n' << "kind symplectic\n" << "dim " << u.dim() << '\n';
    if(tau)
        os << "tau " << *tau << '\n';
    os << "polytope " << u.polytope().to_json().dump() << '\n';
    os << "singular " << u.singular_scale() << '\n';
    os << "margin " << grid.margin() << '\n';
    write_axes(os, grid.grid());
    std::vector<double> f(grid.size(), std::numeric_limits<double>::quiet_NaN());
    for(std::size_t i = 0; i < grid.size(); i++)
        if(grid.valid(i))
            f[i] = u.smooth_jet(grid.grid().node(i)).value;
    write_values(os, f);
    os.precision(old);
}

PotentialFile read_potential(std::istream& is)
{
    std::string line;
    if(!std::getline(is, line) || line != MAGIC)
        throw std::invalid_argument("read_potential: missing header line");
    PotentialFile out;
    int dim = 0;
    double singular = 1, margin = 0;
    std::optional<DelzantPolytope> P;
    std::vector<std::vector<double>> axes;
    std::vector<double> values;
    while(std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if(key == "kind") {
            ls >> out.kind;
        } else if(key == "dim") {
            ls >> dim;
        } else if(key == "tau") {
            double t;
            ls >> t;
            out.tau = t;
        } else if(key == "polytope") {
            std::string rest;
            std::getline(ls, rest);
            P = DelzantPolytope::from_json(nlohmann::json::parse(rest));
        } else if(key == "singular") {
            ls >> singular;
        } else if(key == "margin") {
            ls >> margin;
        } else if(key == "axis") {
            std::size_t n;
            ls >> n;
            std::vector<double> ax(n);
            for(auto& v : ax)
                ls >> v;
            if(!ls)
                throw std::invalid_argument("read_potential: truncated axis line");
            axes.push_back(std::move(ax));
        } else if(key == "values") {
            std::size_t n;
            ls >> n;
            values.resize(n);
            for(auto& v : values) {
                std::string tok;
                if(!(is >> tok))
                    throw std::invalid_argument("read_potential: truncated value block");
                v = tok == "nan" || tok == "-nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(tok);
            }
            break;
        } else if(!key.empty()) {
            throw std::invalid_argument("read_potential: unknown key '" + key + "'");
        }
    }
    if(static_cast<int>(axes.size()) != dim)
        throw std::invalid_argument("read_potential: axis count differs from dim");
    TensorGrid grid(std::move(axes));
    if(values.size() != grid.size())
        throw std::invalid_argument("read_potential: value count differs from grid size");
    if(out.kind == "kahler") {
        out.kahler = KahlerPotential::sampled(std::move(grid), std::move(values), "file");
    } else if(out.kind == "symplectic") {
        if(!P)
            throw std::invalid_argument("read_potential: symplectic potential without polytope");
        PolytopeGrid pg(*P, std::move(grid), margin);
        out.symplectic = SymplecticPotential::sampled(pg, std::move(values), singular);
    } else {
        throw std::invalid_argument("read_potential: unknown kind '" + out.kind + "'");
    }
    return out;
}

}  // namespace toric
