#pragma once
/// End-to-end experiments: harmonic maps from boundary families of
/// symplectic potentials, their Bergman approximants, error norms over an
/// interior window and convergence-rate fits.

#include "toric/bergman.h"
#include "toric/dirichlet.h"
#include "toric/grid.h"
#include "toric/polytope.h"
#include "toric/potentials.h"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace toric {

/// Experiment description, read from JSON:
///   {"polytope": "interval" | {...}, "domain": "interval"|"disc"|"rectangle",
///    "resolution": [n] | [rings, angles] | [nx, ny], "disc_radius": 0.8,
///    "family": "geodesic(0.1)" | "loop(0.05)" | "sheet(0.05)",
///    "boundary": ["guillemin", "perturbed(0.1)", "file:path", ...],
///    "levels": [8, 16, 32, 64], "rho": {"min": -12, "max": 12, "points": 481},
///    "window": 0.1, "quadrature": {"order": 8, "panels_per_level": 8},
///    "output": "results/geodesic"}
/// An explicit "boundary" list (one entry per boundary node) overrides "family".
struct ExperimentConfig {
    std::string name = "experiment";
    nlohmann::json polytope = "interval";
    std::string domain = "interval";
    std::vector<std::size_t> resolution = {21};
    double disc_radius = 0.8;  ///< outermost interior ring; rings at i * disc_radius / rings
    std::string family = "geodesic(0.1)";
    std::vector<std::string> boundary;
    std::vector<int> levels = {8, 16, 32, 64};
    double rho_min = -12, rho_max = 12;
    std::size_t rho_points = 481;
    double window = 0.1;
    QuadratureOptions quadrature;
    std::string output;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// throws std::invalid_argument on inconsistent settings
    void validate() const;

    DelzantPolytope make_polytope() const;
    DomainN make_domain() const;
    /// rho sample grid (same extent on every axis)
    TensorGrid make_rho_grid() const;
    /// boundary potentials in DomainN::boundary_nodes() order
    std::vector<SymplecticPotential> boundary_potentials(const DelzantPolytope& P, const DomainN& N) const;
    /// family member at boundary angle theta (disc families only)
    SymplecticPotential loop_member(const DelzantPolytope& P, double theta) const;
};

/// Parses "name(a)" into name and parameter; a missing parameter yields `fallback`.
std::pair<std::string, double> parse_family(const std::string& spec, double fallback = 0.1);

/// The harmonic map Phi(y, rho) over every node of N (Cartesian or polar)
/// and a rho tensor grid, with the symplectic potentials u(y, .) it came from.
struct HarmonicMap {
    DelzantPolytope polytope;
    DomainN domain;
    TensorGrid rho;
    std::vector<SymplecticPotential> boundary;  ///< boundary_nodes() order
    std::vector<SymplecticPotential> u;         ///< per node
    std::vector<double> phi;                    ///< [node][rho]
    std::vector<double> depth;                  ///< [node][rho]: min_r l_r(grad_rho Phi)

    double at(std::size_t node, std::size_t r) const { return phi[node * rho.size() + r]; }
};

/// u(y, .) = sum_q w_q(y) u_q with the harmonic extension weights of N and
/// Phi(y, .) its Legendre dual on the rho grid. Throws NumericalError naming
/// the (y, x) location if a slice fails the convexity check or a Newton solve.
HarmonicMap solve_harmonic_map(const ExperimentConfig& cfg);
HarmonicMap solve_harmonic_map(const DelzantPolytope& P, const DomainN& N, const TensorGrid& rho,
    std::vector<SymplecticPotential> boundary);

/// Bergman approximant Phi_k sampled on the grids of a harmonic map.
struct Approximant {
    int level = 0;
    std::vector<NormingTable> boundary_tables;
    HarmonicNorming norming;
    std::vector<double> values;  ///< [node][rho]
};

Approximant build_approximant(const HarmonicMap& map, int k, const QuadratureOptions& opt = {});
std::vector<Approximant> build_approximants(const ExperimentConfig& cfg, const HarmonicMap& map);

/// Largest |lambda_alpha(y) - int P_r(theta - gamma) log Q_theta(alpha) dtheta|
/// over the given disc nodes and all alpha, where the integral is taken by
/// composite Gauss-Legendre in theta with fresh norming tables at its nodes.
double poisson_exponent_crosscheck(const ExperimentConfig& cfg, const HarmonicMap& map,
    const Approximant& approx, const std::vector<std::size_t>& nodes, int panels = 32, int order = 16);

/// Error norms at one level. C0 is the sup of |E - m| with E = Phi_k - Phi
/// and m the mean of E over the reference window (first boundary node,
/// depth >= reference_window); c0_raw omits m. Derivative norms are sup
/// norms of centered differences of E over window nodes at least two cells
/// from every grid edge. y-derivatives are NaN on the disc.
struct LevelErrors {
    int k = 0;
    double c0 = 0, c0_raw = 0;
    double c1_y = 0, c1_rho = 0;
    double c2_rhorho = 0, c2_yrho = 0, c2_yy = 0;
};

struct ErrorReport {
    std::string domain;
    double window = 0;
    std::size_t nodes = 0, rho_points = 0;
    std::vector<LevelErrors> levels;
};

LevelErrors level_errors(const HarmonicMap& map, std::span<const double> approx, int k, double window,
    double reference_window = 0.1);
ErrorReport error_report(const HarmonicMap& map, const std::vector<Approximant>& approx, double window,
    double reference_window = 0.1);

/// Least-squares fit of log eps against log k, the spread (max - min) / mean
/// of eps k / log k, and residual sums of squares (in log eps) of the power
/// law and of the model c log k / k.
struct RateFit {
    bool exact = false;  ///< all errors zero; nothing fitted
    double slope = 0, intercept = 0, r2 = 1;
    double flatness = 0;
    double sse_power = 0, sse_logk_over_k = 0;
};

RateFit rate_fit(std::span<const int> levels, std::span<const double> errors);

/// CSV with columns k,C0,C1_y,C1_rho,C2_rhorho,C2_yrho,C2_yy
void write_report_csv(std::ostream& os, const ErrorReport& report);
/// whitespace-separated columns for gnuplot, with the raw C0 appended
void write_report_dat(std::ostream& os, const ErrorReport& report);

}  // namespace toric
