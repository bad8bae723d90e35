#pragma once
/// Acceptance suites: each check runs one experiment at fixed settings and
/// reports pass/fail with the measured quantities.

#include "toric/flows.h"
#include "toric/harness.h"

#include <functional>
#include <string>

namespace toric::suites {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};

/// one line: "[PASS] 6 geodesic-c0 (1.2 s): detail"
std::string format(const CheckResult& r);

/// FS sampled on 2001 rho nodes over [-12, 12], to_symplectic then to_kahler;
/// sup error below 1e-8 away from the grid ends, in under a second.
CheckResult legendre_involution();

/// Perturbed square at 100 random rho in [-3, 3]^2: |grad u(x) - rho| < 1e-6
/// and |(FD hess phi)^{-1} - hess u(x)| < 1e-4 with x = grad phi(rho).
CheckResult gradient_hessian_duality();

/// Reference log Q_k(alpha) for Fubini-Study on CP^1
using NormingReference = std::function<double(int k, int alpha)>;
/// log alpha! (k - alpha)! / (k + 1)!
double beta_log_norming(int k, int alpha);
/// every alpha, k = 1..32, relative error below 1e-6
CheckResult norming_oracle(const NormingReference& reference);

/// |log Q + log P - k u(alpha/k)| < 5e-5 for interior alpha, k = 1..64, with
/// P evaluated through a Kähler potential independent of the quadrature
/// (closed-form FS; sampled Legendre dual for the perturbed metric).
CheckResult duality_identity();

/// sup over the interior window of |Szegő sum - 1| drops by at least 3
/// from k = 16 to k = 64 (FS and perturbed).
CheckResult szego_normalization();

struct ExperimentRun {
    ExperimentConfig config;
    ErrorReport report;
    double crosscheck = 0;  ///< disc only: Poisson exponent path difference
    double seconds = 0;
};

/// default: geodesic(0.1) on CP^1, k in {8, 16, 32, 64}
ExperimentConfig geodesic_config();
/// default: loop(0.05) on the disc, k in {8, 16, 32}
ExperimentConfig disc_config();
ExperimentRun run_experiment(const ExperimentConfig& cfg);

/// mean-adjusted C0 strictly decreasing; (max - min) / min of raw eps k / log k
/// below 0.5; under 60 s.
CheckResult geodesic_c0(const ExperimentRun& run);
/// every C1 and C2 norm strictly decreasing with eps_2k / eps_k <= 0.9
CheckResult geodesic_derivatives(const ExperimentRun& run);
/// C0 strictly decreasing and Poisson cross-check below 1e-8
CheckResult disc_convergence(const ExperimentRun& run);

/// HCMA residual of the loop(0.05) disc solution on a Cartesian (q, s, rho)
/// grid: ratio under halving in [2.5, 6]; Phi_rhorho > 0 at every node.
CheckResult hcma_convergence();

/// Eells-Sampson residual of dual heat-flow snapshots drops by at least 3
/// when h and the rho spacing are halved and dtau is quartered.
CheckResult flow_duality();

/// R_k over the geodesic family: C = exp max |log R_k| stable within 20% from
/// k = 16 to 64, max |R_k - R_inf| strictly decreasing over {8, 16, 32, 64}.
CheckResult ratio_bounds();

/// FS and perturbed: dispersion of the peak constants over alpha/k in
/// [0.375, 0.625] at most 5% at k = 64 and decreasing over k = 16, 64, 256.
CheckResult peak_asymptotics();

/// sup over the interior window of the localization tail at delta = 0.25
/// drops by at least 10 from k = 8 to k = 64 (FS and perturbed).
CheckResult localization();

}  // namespace toric::suites
