#pragma once
/// Norming constants of toric monomials, normalized monomials, peak values,
/// Szegő sums and the Bergman approximants of a harmonic family of metrics.
///
/// All norming constants are computed on the polytope after the moment-map
/// change of variables,
///   Q(alpha) = int_P exp(k u(x) + <alpha - k x, grad u(x)>) dx,
/// with the torus volume (2 pi)^m and the 1/V normalisation dropped for every
/// alpha alike. Everything is kept in the log domain.

#include "toric/dirichlet.h"
#include "toric/polytope.h"
#include "toric/potentials.h"

#include <iosfwd>
#include <string>
#include <vector>

namespace toric {

/// alpha -> log Q_k(alpha) over kP ∩ Z^m.
struct NormingTable {
    int level = 0;
    LatticeSet lattice;
    std::vector<double> log_q;  ///< parallel to lattice.points
    std::string provenance;

    std::size_t size() const { return log_q.size(); }
    /// log Q of a lattice point; throws std::out_of_range if absent
    double at(std::span<const std::int64_t> alpha) const;
    NormingTable shifted(double c) const;

    /// CSV with header "k,alpha,log_q"; multi-coordinate alphas are quoted
    void write_csv(std::ostream& os) const;
    static NormingTable read_csv(std::istream& is);
};

struct QuadratureOptions {
    int order = 8;             ///< Gauss-Legendre nodes per panel
    int panels_per_level = 8;  ///< panels per axis and per unit of k
    bool validate = true;      ///< repeat with doubled panels and compare
    double tolerance = 1e-9;   ///< allowed |log Q - log Q_doubled|
};

/// log Q_k(alpha) for every alpha in kP; dimensions 1 and 2. Throws
/// NumericalError listing the offending alphas when panel doubling disagrees.
NormingTable norming_constants(const SymplecticPotential& u, int k, const QuadratureOptions& opt = {});

/// <alpha, rho> - k phi(rho) - log Q(alpha)
double log_normalized_monomial(const NormingTable& table, const KahlerPotential& phi,
    std::span<const std::int64_t> alpha, const Vec& rho);
double normalized_monomial(const NormingTable& table, const KahlerPotential& phi,
    std::span<const std::int64_t> alpha, const Vec& rho);

/// Peak value: the normalized monomial at rho* = grad u(alpha/k), with phi
/// evaluated by an independent inverse Legendre solve (or the supplied phi).
/// Rejects alpha/k on the boundary of P.
double peak_value(const NormingTable& table, const SymplecticPotential& u, std::span<const std::int64_t> alpha);
double peak_value(const NormingTable& table, const SymplecticPotential& u, const KahlerPotential& phi,
    std::span<const std::int64_t> alpha);
/// k u(alpha/k) - log Q(alpha)
double log_peak_by_duality(const NormingTable& table, const SymplecticPotential& u,
    std::span<const std::int64_t> alpha);

/// k e^{-alpha} alpha^alpha / alpha!  (0^0 = 1), via log-Gamma
double bargmann_fock_peak(int k, int alpha);

/// k^{-m} sum_alpha P(alpha, rho); tends to 1 in the interior
double szego_sum(const NormingTable& table, const KahlerPotential& phi, const Vec& rho);

/// k^{-m} times the sum of P(alpha, rho) over alpha with
/// |alpha/k - grad phi(rho)| > k^{delta - 1/2} (Euclidean norm).
double localization_gap(const NormingTable& table, const KahlerPotential& phi, const Vec& rho, double delta);

struct PeakAsymptotics {
    std::vector<double> constants;  ///< P(alpha) k^{-m/2} / sqrt(det hess u(alpha/k))
    double mean = 0;
    double dispersion = 0;          ///< (max - min) / mean
};
/// Rejects alphas with a facet closer than 1/(sqrt(k) log k).
PeakAsymptotics peak_asymptotics_check(const NormingTable& table, const SymplecticPotential& u,
    const std::vector<LatticePoint>& alphas);

/// Harmonic extensions lambda_alpha over N of boundary log norming constants.
struct HarmonicNorming {
    int level = 0;
    LatticeSet lattice;
    std::vector<HarmonicField> lambda;  ///< [alpha][node]

    std::size_t size() const { return lambda.size(); }
};

/// `boundary_tables` are given in the order of N.boundary_nodes() and must
/// share one lattice set.
HarmonicNorming harmonic_norming(const DomainN& N, const std::vector<NormingTable>& boundary_tables);

/// (1/k) log sum_alpha exp(<alpha, rho> - lambda_alpha(y))
double bergman_potential(const HarmonicNorming& H, std::size_t node, const Vec& rho);
/// The same log-sum-exp with explicit exponents lambda_alpha (one per lattice
/// point); used for boundary tables and off-grid evaluation.
double bergman_potential(const LatticeSet& lattice, std::span<const double> lambda, const Vec& rho);

struct RatioReport {
    double log_rk = 0;      ///< log R_k
    double log_rinf = 0;    ///< log R_inf(alpha/k)
    double rk() const;
    double rinf() const;
};

/// R_k(y, alpha) = Q_y(alpha) exp(-lambda_alpha(y)), which by duality equals
/// exp(ext(log P_q) - log P_y); its limit replaces log P by
/// (1/2) log det hess u, i.e. R_inf = exp((log delta_y - ext(log delta_q)) / 2)
/// with delta from the Abreu formula and ext the harmonic extension.
RatioReport ratio_report(const DomainN& N, const HarmonicNorming& H, const NormingTable& table_at_y,
    const std::vector<SymplecticPotential>& boundary_u, const SymplecticPotential& u_y, std::size_t node,
    std::span<const std::int64_t> alpha);

}  // namespace toric
