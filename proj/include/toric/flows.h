#pragma once
/// Heat flow of symplectic potentials over a parameter domain, and the PDE
/// residuals satisfied by their Legendre duals: the harmonic map
/// (Eells-Sampson) operator and the reduced homogeneous complex Monge-Ampère
/// determinant.

#include "toric/dirichlet.h"
#include "toric/grid.h"
#include "toric/potentials.h"

#include <functional>
#include <iosfwd>
#include <vector>

namespace toric {

/// u(tau, y, x) over the nodes of an interval or rectangle domain and a
/// polytope grid; values are stored [y][x] and are NaN at invalid x nodes.
class FlowState {
public:
    using Initial = std::function<double(const Vec& y, const Vec& x)>;

    FlowState(DomainN N, PolytopeGrid X, const Initial& u);

    double tau() const { return tau_; }
    const DomainN& domain() const { return N_; }
    const PolytopeGrid& xgrid() const { return X_; }
    double value(std::size_t y, std::size_t x) const { return u_[y * X_.size() + x]; }
    std::span<const double> slice(std::size_t y) const { return {u_.data() + y * X_.size(), X_.size()}; }
    /// u(y, .) as a symplectic potential (singular part u0 plus sampled rest)
    SymplecticPotential potential(std::size_t y) const;

    /// per y node: u(y, .) has a positive definite FD Hessian at every x node
    /// whose full stencil is valid
    const std::vector<char>& convex() const { return convex_; }
    struct ConvexityLoss {
        double tau;
        std::size_t y;
    };
    const std::vector<ConvexityLoss>& convexity_losses() const { return losses_; }

    /// largest stable explicit step h_min^2 / (2 n)
    double max_step() const;

private:
    friend FlowState heat_evolve(const FlowState&, double, int);
    DomainN N_;
    PolytopeGrid X_;
    double tau_ = 0;
    std::vector<double> u_;
    std::vector<char> convex_;
    std::vector<ConvexityLoss> losses_;
    void check_convexity();
};

/// Explicit Euler steps of du/dtau = Delta_N u with boundary slices held
/// fixed; rejects steps above max_step().
FlowState heat_evolve(const FlowState& state, double dtau, int steps);

/// Writes u(y, .) of a snapshot in the potential text format with a tau line.
void write_snapshot(std::ostream& os, const FlowState& state, std::size_t y);

/// Phi(y, rho) sampled on tensor grids; values are [y][rho] with NaN marking
/// nodes outside the domain (e.g. Cartesian nodes outside the unit disc).
struct HarmonicFamily {
    TensorGrid y;
    TensorGrid rho;
    std::vector<double> values;

    double at(std::size_t iy, std::size_t ir) const { return values[iy * rho.size() + ir]; }
};

/// Legendre duals Phi(y, .) = to_kahler(u(y, .)) of every slice of a flow state.
HarmonicFamily dual_family(const FlowState& state, const TensorGrid& rho);

struct ResidualReport {
    double sup = 0;
    double mean = 0;
    std::size_t count = 0;       ///< nodes evaluated
    double y_spacing = 0;        ///< largest y spacing
    double rho_spacing = 0;      ///< largest rho spacing
    std::size_t positivity_violations = 0;  ///< nodes with Phi_rhorho <= 0 (HCMA only)
};

/// Pointwise Delta_y Phi - sum_a (grad_rho Phi_a)^T (hess_rho Phi)^{-1} (grad_rho Phi_a)
/// at nodes at least two cells from every grid edge (NaN elsewhere). Throws
/// NumericalError if a rho-Hessian is singular.
std::vector<double> eells_sampson_field(const HarmonicFamily& phi);
ResidualReport eells_sampson_residual(const HarmonicFamily& phi);
/// |d_tau Phi - E(Phi)| with d_tau Phi the forward difference between two
/// snapshots on the same grids and E evaluated at the earlier one.
ResidualReport eells_sampson_residual(const HarmonicFamily& earlier, const HarmonicFamily& later, double dtau);

/// For m = 1 and y = (q, s): (Phi_qq + Phi_ss) Phi_rhorho - Phi_qrho^2 - Phi_srho^2
/// pointwise, NaN where the stencil leaves the domain or the 2-cell margin.
std::vector<double> hcma_field(const HarmonicFamily& phi);
/// sup and mean of |hcma_field|; counts nodes with Phi_rhorho <= 0 among all
/// nodes where it can be differenced.
ResidualReport hcma_residual(const HarmonicFamily& phi);

}  // namespace toric
