#include "toric/suites.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace toric::suites {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

DelzantPolytope interval_polytope()
{
    return DelzantPolytope::preset("interval");
}

Vec v1(double a)
{
    return Vec::Constant(1, a);
}

/// the two CP^1 metrics used by the diagnostics: FS and perturbed(0.1)
struct Metric {
    std::string name;
    SymplecticPotential u;
    KahlerPotential phi;
};

std::vector<Metric> diagnostic_metrics()
{
    const auto P = interval_polytope();
    const auto up = SymplecticPotential::perturbed(P, 0.1);
    // sampled dual, independent of the Newton path used inside the quadrature
    const auto phi_p = to_kahler(up, TensorGrid::uniform(1, -16, 16, 6401));
    return {{"fs", SymplecticPotential::guillemin(P), KahlerPotential::fubini_study()}, {"perturbed", up, phi_p}};
}

/// rho nodes whose moment image has every facet value at least 0.1
std::vector<Vec> interior_window(const SymplecticPotential& u)
{
    std::vector<Vec> out;
    for(double x : linspace(0.1, 0.9, 33))
        out.push_back(u.jet(v1(x)).grad);
    return out;
}

std::string sci(double v)
{
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
}

bool strictly_decreasing(const std::vector<double>& v)
{
    for(std::size_t i = 1; i < v.size(); i++)
        if(!(v[i] < v[i - 1]))
            return false;
    return true;
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for(std::size_t i = 0; i < v.size(); i++)
        s += (i ? " " : "") + sci(v[i]);
    return s;
}

}  // namespace

std::string format(const CheckResult& r)
{
    std::ostringstream os;
    os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << " (" << std::fixed << std::setprecision(2)
       << r.seconds << " s): " << r.detail;
    return os.str();
}

// ---------------------------------------------------------------- Legendre

CheckResult legendre_involution()
{
    CheckResult res{1, "legendre-involution", false, {}, 0};
    const auto start = Clock::now();
    const auto rgrid = TensorGrid::uniform(1, -12, 12, 2001);
    std::vector<double> vals;
    for(double r : rgrid.axis(0))
        vals.push_back(std::log1p(std::exp(r)));
    const auto phi = KahlerPotential::sampled(rgrid, vals, "fubini-study");
    const auto u = to_symplectic(phi, PolytopeGrid::uniform(interval_polytope(), 2001, 1e-5));
    const auto back = to_kahler(u, rgrid);
    double err = 0;
    for(std::size_t i = 5; i + 5 < rgrid.size(); i++)
        err = std::max(err, std::fabs(back.values()[i] - vals[i]));
    res.seconds = elapsed(start);
    res.passed = err < 1e-8 && res.seconds < 1;
    res.detail = "sup error " + sci(err) + " (< 1e-8), runtime < 1 s";
    return res;
}

CheckResult gradient_hessian_duality()
{
    CheckResult res{2, "gradient-hessian-duality", false, {}, 0};
    const auto start = Clock::now();
    const auto P = DelzantPolytope::preset("square");
    const auto u = SymplecticPotential::perturbed(P, 0.3);
    const auto phi = legendre_dual(u);
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> U(-3, 3);
    const double h = 1e-3;
    double grad_err = 0, hess_err = 0;
    for(int t = 0; t < 100; t++) {
        Vec rho(2);
        rho << U(gen), U(gen);
        const Vec x = moment_map(phi, rho);
        const Jet j = u.jet(x);
        grad_err = std::max(grad_err, (j.grad - rho).cwiseAbs().maxCoeff());
        Mat H(2, 2);
        for(int a = 0; a < 2; a++)
            for(int b = 0; b < 2; b++) {
                Vec ea = Vec::Zero(2), eb = Vec::Zero(2);
                ea[a] = h;
                eb[b] = h;
                H(a, b) = (phi.value(rho + ea + eb) - phi.value(rho + ea - eb) - phi.value(rho - ea + eb)
                    + phi.value(rho - ea - eb)) / (4 * h * h);
            }
        hess_err = std::max(hess_err, (Mat(H.inverse()) - j.hess).cwiseAbs().maxCoeff());
    }
    res.seconds = elapsed(start);
    res.passed = grad_err < 1e-6 && hess_err < 1e-4;
    res.detail = "gradient " + sci(grad_err) + " (< 1e-6), Hessian " + sci(hess_err) + " (< 1e-4)";
    return res;
}

// ---------------------------------------------------------------- norming constants

double beta_log_norming(int k, int alpha)
{
    return std::lgamma(alpha + 1.0) + std::lgamma(k - alpha + 1.0) - std::lgamma(k + 2.0);
}

CheckResult norming_oracle(const NormingReference& reference)
{
    CheckResult res{3, "norming-oracle", false, {}, 0};
    const auto start = Clock::now();
    const auto u = SymplecticPotential::guillemin(interval_polytope());
    double worst = 0;
    for(int k = 1; k <= 32; k++) {
        const NormingTable t = norming_constants(u, k);
        for(int a = 0; a <= k; a++) {
            const std::int64_t alpha[] = {a};
            worst = std::max(worst, std::fabs(std::expm1(t.at(alpha) - reference(k, a))));
        }
    }
    res.seconds = elapsed(start);
    res.passed = worst < 1e-6;
    res.detail = "max relative error " + sci(worst) + " over k <= 32 (< 1e-6)";
    return res;
}

CheckResult duality_identity()
{
    CheckResult res{4, "duality-identity", false, {}, 0};
    const auto start = Clock::now();
    double worst = 0;
    for(const auto& m : diagnostic_metrics())
        for(int k = 2; k <= 64; k++) {
            const NormingTable t = norming_constants(m.u, k);
            for(int a = 1; a < k; a++) {
                const std::int64_t alpha[] = {a};
                const double log_p = std::log(peak_value(t, m.u, m.phi, alpha));
                const double ku = k * m.u.value(static_cast<double>(a) / k);
                worst = std::max(worst, std::fabs(t.at(alpha) + log_p - ku));
            }
        }
    res.seconds = elapsed(start);
    res.passed = worst < 5e-5;
    res.detail = "max |log Q + log P - k u(alpha/k)| = " + sci(worst) + " (< 5e-5)";
    return res;
}

CheckResult szego_normalization()
{
    CheckResult res{5, "szego-normalization", false, {}, 0};
    const auto start = Clock::now();
    res.passed = true;
    for(const auto& m : diagnostic_metrics()) {
        double e[2] = {0, 0};
        const int levels[2] = {16, 64};
        for(int i = 0; i < 2; i++) {
            const NormingTable t = norming_constants(m.u, levels[i]);
            for(const Vec& rho : interior_window(m.u))
                e[i] = std::max(e[i], std::fabs(szego_sum(t, m.phi, rho) - 1));
        }
        const double ratio = e[0] / e[1];
        res.passed = res.passed && ratio >= 3;
        res.detail += m.name + ": " + sci(e[0]) + " -> " + sci(e[1]) + " (factor " + sci(ratio) + ") ";
    }
    res.detail += "(factor >= 3)";
    res.seconds = elapsed(start);
    return res;
}

// ---------------------------------------------------------------- experiments

ExperimentConfig geodesic_config()
{
    ExperimentConfig c;
    c.name = "geodesic";
    return c;
}

ExperimentConfig disc_config()
{
    return ExperimentConfig::from_json({{"name", "disc"}, {"domain", "disc"}, {"family", "loop(0.05)"},
        {"resolution", {4, 128}}, {"levels", {8, 16, 32}}, {"rho", {{"points", 241}}}});
}

ExperimentRun run_experiment(const ExperimentConfig& cfg)
{
    const auto start = Clock::now();
    ExperimentRun run{cfg, {}, 0, 0};
    const HarmonicMap map = solve_harmonic_map(cfg);
    const auto approx = build_approximants(cfg, map);
    run.report = error_report(map, approx, cfg.window);
    if(map.domain.kind() == DomainKind::Disc && cfg.boundary.empty() && parse_family(cfg.family).first == "loop") {
        const DomainN& N = map.domain;
        const std::size_t rings = N.radii().size() - 1, na = N.angle_count();
        std::vector<std::size_t> nodes = {0};
        for(std::size_t i = 0; i < rings; i++)
            nodes.push_back(N.disc_index(i, (5 + 37 * i) % na));
        for(const auto& A : approx)
            run.crosscheck = std::max(run.crosscheck, poisson_exponent_crosscheck(cfg, map, A, nodes));
    }
    run.seconds = elapsed(start);
    return run;
}

CheckResult geodesic_c0(const ExperimentRun& run)
{
    CheckResult res{6, "geodesic-c0", false, {}, 0};
    std::vector<double> c0, stat;
    for(const auto& l : run.report.levels) {
        c0.push_back(l.c0);
        stat.push_back(l.c0_raw * l.k / std::log(static_cast<double>(l.k)));
    }
    const auto [lo, hi] = std::minmax_element(stat.begin(), stat.end());
    const double spread = (*hi - *lo) / *lo;
    res.seconds = run.seconds;
    res.passed = c0.size() >= 2 && strictly_decreasing(c0) && spread < 0.5 && run.seconds < 60;
    res.detail = "adjusted C0 " + join(c0) + "; eps k/log k spread " + sci(spread) + " (< 0.5)";
    return res;
}

CheckResult geodesic_derivatives(const ExperimentRun& run)
{
    CheckResult res{7, "geodesic-derivatives", false, {}, 0};
    res.seconds = run.seconds;
    res.passed = run.report.levels.size() >= 2;
    double worst_ratio = 0;
    const std::pair<const char*, double LevelErrors::*> norms[] = {{"C1_y", &LevelErrors::c1_y},
        {"C1_rho", &LevelErrors::c1_rho}, {"C2_rhorho", &LevelErrors::c2_rhorho}, {"C2_yrho", &LevelErrors::c2_yrho},
        {"C2_yy", &LevelErrors::c2_yy}};
    for(const auto& [name, field] : norms) {
        std::vector<double> v;
        for(const auto& l : run.report.levels)
            v.push_back(l.*field);
        for(std::size_t i = 1; i < v.size(); i++) {
            const double ratio = v[i] / v[i - 1];
            worst_ratio = std::max(worst_ratio, std::isfinite(ratio) ? ratio : 1e300);
        }
        if(!strictly_decreasing(v))
            res.passed = false;
    }
    res.passed = res.passed && worst_ratio <= 0.9;
    res.detail = "largest eps_2k/eps_k " + sci(worst_ratio) + " (<= 0.9) over C1_y C1_rho C2_rhorho C2_yrho C2_yy";
    return res;
}

CheckResult disc_convergence(const ExperimentRun& run)
{
    CheckResult res{8, "disc-convergence", false, {}, 0};
    std::vector<double> c0;
    for(const auto& l : run.report.levels)
        c0.push_back(l.c0);
    res.seconds = run.seconds;
    res.passed = c0.size() >= 2 && strictly_decreasing(c0) && run.crosscheck < 1e-8;
    res.detail = "C0 " + join(c0) + "; Poisson exponent paths differ by " + sci(run.crosscheck) + " (< 1e-8)";
    return res;
}

// ---------------------------------------------------------------- PDE residuals

CheckResult hcma_convergence()
{
    CheckResult res{9, "hcma-residual", false, {}, 0};
    const auto start = Clock::now();
    const auto P = interval_polytope();
    const auto N = DomainN::disc({0.5}, 256);
    ExperimentConfig cfg = disc_config();
    const auto boundary = cfg.boundary_potentials(P, N);

    auto residual = [&](std::size_t ny, std::size_t nr) {
        const TensorGrid yg({linspace(-0.6, 0.6, ny), linspace(-0.6, 0.6, ny)});
        const TensorGrid rg({linspace(-4, 4, nr)});
        HarmonicFamily fam{yg, rg, {}};
        fam.values.reserve(yg.size() * rg.size());
        for(std::size_t i = 0; i < yg.size(); i++) {
            const auto w = extension_weights(N, yg.node(i));
            const auto phi = legendre_dual(SymplecticPotential::combination(w, boundary));
            for(double r : rg.axis(0))
                fam.values.push_back(phi.value(v1(r)));
        }
        return hcma_residual(fam);
    };
    const ResidualReport coarse = residual(13, 41), fine = residual(25, 81);
    const double ratio = coarse.sup / fine.sup;
    res.seconds = elapsed(start);
    res.passed = ratio >= 2.5 && ratio <= 6 && coarse.positivity_violations == 0 && fine.positivity_violations == 0;
    res.detail = "sup " + sci(coarse.sup) + " -> " + sci(fine.sup) + ", ratio " + sci(ratio) + " (in [2.5, 6]); "
        + std::to_string(coarse.positivity_violations + fine.positivity_violations) + " nodes with Phi_rhorho <= 0";
    return res;
}

CheckResult flow_duality()
{
    CheckResult res{10, "flow-duality", false, {}, 0};
    const auto start = Clock::now();
    const auto X = PolytopeGrid::uniform(interval_polytope(), 201, 0.002);
    const FlowState::Initial init = [](const Vec& y, const Vec& x) {
        const double ell = x[0] * (1 - x[0]);
        return x[0] * std::log(x[0]) + (1 - x[0]) * std::log(1 - x[0])
            + 0.1 * ell * (y[0] + std::sin(std::numbers::pi * y[0]));
    };
    const double tau_end = 0.01;
    auto residual = [&](std::size_t ny, std::size_t nr, double dtau) {
        const FlowState s0(DomainN::interval(ny), X, init);
        const int steps = static_cast<int>(std::lround(tau_end / dtau));
        const FlowState a = heat_evolve(s0, dtau, steps);
        const FlowState b = heat_evolve(a, dtau, 1);
        const TensorGrid rho({linspace(-3, 3, nr)});
        return eells_sampson_residual(dual_family(a, rho), dual_family(b, rho), dtau);
    };
    const double dtau = 0.00125;
    const ResidualReport coarse = residual(11, 31, dtau), fine = residual(21, 61, dtau / 4);
    const double ratio = coarse.sup / fine.sup;
    res.seconds = elapsed(start);
    res.passed = ratio >= 3;
    res.detail = "sup " + sci(coarse.sup) + " -> " + sci(fine.sup) + ", factor " + sci(ratio) + " (>= 3)";
    return res;
}

// ---------------------------------------------------------------- diagnostics

CheckResult ratio_bounds()
{
    CheckResult res{11, "ratio-bounds", false, {}, 0};
    const auto start = Clock::now();
    const ExperimentConfig cfg = geodesic_config();
    const auto P = cfg.make_polytope();
    const auto N = cfg.make_domain();
    const auto boundary = cfg.boundary_potentials(P, N);
    const auto W = kernel_table(N);
    std::vector<double> bound, gap;
    for(int k : cfg.levels) {
        std::vector<NormingTable> tables;
        for(const auto& b : boundary)
            tables.push_back(norming_constants(b, k, cfg.quadrature));
        const auto H = harmonic_norming(N, tables);
        double log_c = 0, d = 0;
        for(std::size_t y : N.interior_nodes()) {
            const auto uy = SymplecticPotential::combination(W[y], boundary);
            const NormingTable ty = norming_constants(uy, k, cfg.quadrature);
            for(int a = 1; a < k; a++) {
                const std::int64_t alpha[] = {a};
                const RatioReport r = ratio_report(N, H, ty, boundary, uy, y, alpha);
                log_c = std::max(log_c, std::fabs(r.log_rk));
                d = std::max(d, std::fabs(r.rk() - r.rinf()));
            }
        }
        bound.push_back(std::exp(log_c));
        gap.push_back(d);
    }
    // C at k = 16 and k = 64
    const double drift = std::fabs(bound[3] / bound[1] - 1);
    std::vector<double> log_c;
    for(double c : bound)
        log_c.push_back(std::log(c));
    res.seconds = elapsed(start);
    res.passed = drift <= 0.2 && strictly_decreasing(gap);
    res.detail = "log C " + join(log_c) + " (C drift 16->64 " + sci(drift) + " <= 0.2); max|R_k - R_inf| "
        + join(gap) + " (strictly decreasing)";
    return res;
}

CheckResult peak_asymptotics()
{
    CheckResult res{12, "peak-asymptotics", false, {}, 0};
    const auto start = Clock::now();
    res.passed = true;
    for(const auto& m : diagnostic_metrics()) {
        std::vector<double> disp;
        for(int k : {16, 64, 256}) {
            std::vector<LatticePoint> alphas;
            for(int a = 0; a <= k; a++)
                if(8 * a >= 3 * k && 8 * a <= 5 * k)
                    alphas.push_back({a});
            disp.push_back(peak_asymptotics_check(norming_constants(m.u, k), m.u, alphas).dispersion);
        }
        res.passed = res.passed && disp[1] <= 0.05 && strictly_decreasing(disp);
        res.detail += m.name + " dispersion " + join(disp) + "; ";
    }
    res.detail += "(<= 5% at k = 64, decreasing)";
    res.seconds = elapsed(start);
    return res;
}

CheckResult localization()
{
    CheckResult res{13, "localization", false, {}, 0};
    const auto start = Clock::now();
    res.passed = true;
    for(const auto& m : diagnostic_metrics()) {
        double tail[2] = {0, 0};
        const int levels[2] = {8, 64};
        for(int i = 0; i < 2; i++) {
            const NormingTable t = norming_constants(m.u, levels[i]);
            for(const Vec& rho : interior_window(m.u))
                tail[i] = std::max(tail[i], localization_gap(t, m.phi, rho, 0.25));
        }
        const double ratio = tail[0] / tail[1];
        res.passed = res.passed && ratio >= 10;
        res.detail += m.name + ": " + sci(tail[0]) + " -> " + sci(tail[1]) + " (factor " + sci(ratio) + ") ";
    }
    res.detail += "(factor >= 10)";
    res.seconds = elapsed(start);
    return res;
}

}  // namespace toric::suites
