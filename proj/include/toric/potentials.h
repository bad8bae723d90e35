#pragma once
/// Toric Kähler potentials phi(rho) on the open orbit and symplectic
/// potentials u(x) = u0(x) + f(x) on the polytope, related by the Legendre
/// transform u(x) = <x, rho> - phi(rho) with x = grad phi(rho).
///
/// Convention: rho is the primal log-radial variable (z = e^{rho/2 + i theta}),
/// so the transform is the classical convex conjugate without the factor 2
/// that appears when it is written in terms of |z|.

#include "toric/grid.h"
#include "toric/polytope.h"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

namespace toric {

/// Samples in rho; tensor product, strictly increasing per axis.
using RadialGrid = TensorGrid;

/// Tensor x-grid over the bounding box of P; nodes with min_r l_r(x) >= margin
/// are valid.
class PolytopeGrid {
public:
    PolytopeGrid(const DelzantPolytope& P, TensorGrid grid, double margin);
    /// n equispaced samples per axis spanning the box shrunk by `margin`
    static PolytopeGrid uniform(const DelzantPolytope& P, std::size_t n, double margin);

    const DelzantPolytope& polytope() const { return P_; }
    const TensorGrid& grid() const { return grid_; }
    double margin() const { return margin_; }
    bool valid(std::size_t flat) const { return valid_[flat] != 0; }
    /// valid node with an invalid or missing neighbour along some axis
    bool boundary_adjacent(std::size_t flat) const { return adjacent_[flat] != 0; }
    bool all_valid() const;
    std::size_t size() const { return grid_.size(); }

private:
    DelzantPolytope P_;
    TensorGrid grid_;
    double margin_;
    std::vector<char> valid_, adjacent_;
};

/// Boundary margin eps_bd = 1/(4 k_max).
double boundary_margin(int max_level);

/// A smooth function on (a neighbourhood of) P given by its jet.
class BasisFunction {
public:
    virtual ~BasisFunction() = default;
    virtual Jet jet(const Vec& x) const = 0;
    virtual std::string describe() const = 0;
};

/// prod_r l_r(x)
std::shared_ptr<const BasisFunction> facet_product(const DelzantPolytope& P);
/// basis from a user-supplied jet
std::shared_ptr<const BasisFunction> custom_basis(std::function<Jet(const Vec&)> fn, std::string name);
/// interpolant of samples on a polytope grid (cubic spline for m=1, C1
/// bicubic for m=2 with all nodes valid)
std::shared_ptr<const BasisFunction> sampled_basis(const PolytopeGrid& grid, std::vector<double> values);

class KahlerPotential {
public:
    using Evaluator = std::function<Jet(const Vec&)>;

    static KahlerPotential closed_form(int dim, Evaluator fn, std::string name);
    static KahlerPotential sampled(RadialGrid grid, std::vector<double> values, std::string name = "sampled");
    /// log(1 + e^rho), moment polytope [0,1]
    static KahlerPotential fubini_study();
    /// |rho|^2 / 2
    static KahlerPotential quadratic(int dim);

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    bool has_grid() const { return grid_.has_value(); }
    const RadialGrid& grid() const;
    const std::vector<double>& values() const { return values_; }
    bool has_closed_form() const { return static_cast<bool>(closed_); }

    Jet jet(const Vec& rho) const;
    double value(const Vec& rho) const { return jet(rho).value; }
    double value(double rho) const;
    /// rho inside the sample range (always true for closed forms)
    bool in_domain(const Vec& rho) const;

    /// phi + c (keeps the representation)
    KahlerPotential shifted(double c) const;
    /// grid nodes (at least one cell from the edge) where the FD Hessian is
    /// not positive definite
    std::vector<std::size_t> convexity_failures() const;

private:
    int dim_ = 0;
    std::string name_;
    std::optional<RadialGrid> grid_;
    std::vector<double> values_;
    std::shared_ptr<const CubicSpline> spline_;
    std::shared_ptr<const BicubicSurface> surface_;
    Evaluator closed_;
};

/// u = s * u0 + sum_j c_j b_j + const, with u0 = sum_r l_r log l_r the
/// Guillemin potential (s = 1 for genuine symplectic potentials, s = 0 for
/// potentials without logarithmic boundary behaviour).
class SymplecticPotential {
public:
    struct Term {
        double coef;
        std::shared_ptr<const BasisFunction> basis;
    };

    explicit SymplecticPotential(DelzantPolytope P, double singular_scale = 1.0);

    static SymplecticPotential guillemin(const DelzantPolytope& P);
    /// u0 + a * prod_r l_r
    static SymplecticPotential perturbed(const DelzantPolytope& P, double a);
    /// u0 + f with f sampled on the grid (nan at invalid nodes)
    static SymplecticPotential sampled(const PolytopeGrid& grid, std::vector<double> f, double singular_scale = 1.0);
    /// sum_q w_q u_q; terms sharing a basis object are merged
    static SymplecticPotential combination(std::span<const double> weights,
        std::span<const SymplecticPotential> potentials);

    SymplecticPotential with_term(double coef, std::shared_ptr<const BasisFunction> basis) const;
    SymplecticPotential shifted(double c) const;

    const DelzantPolytope& polytope() const { return P_; }
    int dim() const { return P_.dim(); }
    double singular_scale() const { return singular_; }
    double constant() const { return constant_; }
    const std::vector<Term>& terms() const { return terms_; }

    /// full jet; throws std::domain_error outside the open polytope when the
    /// singular part is present
    Jet jet(const Vec& x) const;
    double value(const Vec& x) const { return jet(x).value; }
    double value(double x) const;
    /// jet of the smooth part f = u - s u0
    Jet smooth_jet(const Vec& x) const;

private:
    DelzantPolytope P_;
    double singular_ = 1.0;
    double constant_ = 0;
    std::vector<Term> terms_;
};

/// sum_r l_r(x) log l_r(x); rejects boundary or exterior points
double guillemin_potential(const DelzantPolytope& P, std::span<const double> x);
Jet guillemin_jet(const DelzantPolytope& P, const Vec& x);

struct LegendreOptions {
    double tolerance = 1e-12;  ///< on |grad - target|
    int max_iterations = 100;
};

/// Solves grad phi(rho) = x; `guess` warm-starts the iteration.
Vec invert_moment_map(const KahlerPotential& phi, const Vec& x, const Vec* guess = nullptr,
    const LegendreOptions& opt = {});
/// Solves grad u(x) = rho inside P.
Vec invert_symplectic_gradient(const SymplecticPotential& u, const Vec& rho, const Vec* guess = nullptr,
    const LegendreOptions& opt = {});

/// Legendre transform of phi sampled at the valid nodes of the polytope grid.
SymplecticPotential to_symplectic(const KahlerPotential& phi, const PolytopeGrid& grid,
    double singular_scale = 1.0, const LegendreOptions& opt = {});
/// Inverse Legendre transform sampled on a radial grid.
KahlerPotential to_kahler(const SymplecticPotential& u, const RadialGrid& grid, const LegendreOptions& opt = {});
/// Inverse Legendre transform as an on-demand evaluator (one Newton solve per
/// call); value, gradient x and Hessian (hess u)^{-1}.
KahlerPotential legendre_dual(const SymplecticPotential& u, const LegendreOptions& opt = {});

/// grad phi(rho)
Vec moment_map(const KahlerPotential& phi, const Vec& rho);

/// delta(x) = 1 / (det hess u(x) * prod_r l_r(x)); throws NumericalError
/// when the Hessian is not positive definite.
double abreu_delta(const SymplecticPotential& u, const Vec& x);

/// Named presets: "fubini-study", "guillemin", "perturbed(a)".
SymplecticPotential symplectic_preset(const std::string& name, const DelzantPolytope& P);

// Text format: header lines, then row-major values (lossless decimal).
void write_potential(std::ostream& os, const KahlerPotential& phi, std::optional<double> tau = {});
void write_potential(std::ostream& os, const SymplecticPotential& u, const PolytopeGrid& grid,
    std::optional<double> tau = {});
struct PotentialFile {
    std::string kind;  ///< "kahler" or "symplectic"
    std::optional<double> tau;
    std::optional<KahlerPotential> kahler;
    std::optional<SymplecticPotential> symplectic;
};
PotentialFile read_potential(std::istream& is);

}  // namespace toric
