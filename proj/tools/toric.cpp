/// Command-line driver for the experiment suites.
///
///   toric geodesic      [--config f.json] [--out dir] [--levels 8,16,32,64] [--resolution 21] [--window 0.1]
///   toric disc          [--config f.json] [--out dir] [--levels 8,16,32] [--resolution 4,128] [--window 0.1]
///   toric flow-duality  [--out dir] [--resolution 21] [--snapshot-every 4]
///   toric diagnostics   [szego] [localization] [peak-asymptotics] [ratio-bounds]
///   toric legendre-check
///
/// The exit status is 1 if any check of the invoked suite fails and 2 on errors.

#include "toric/flows.h"
#include "toric/harness.h"
#include "toric/suites.h"

#include "CLI11.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

using namespace toric;
namespace fs = std::filesystem;

namespace {

struct ExperimentOptions {
    std::string config;
    std::string out;
    std::vector<int> levels;
    std::vector<std::size_t> resolution;
    double window = 0;
};

void add_experiment_options(CLI::App* app, ExperimentOptions& o)
{
    app->add_option("--config", o.config, "experiment description (JSON)")->check(CLI::ExistingFile);
    app->add_option("--out", o.out, "output directory for CSV and .dat files");
    app->add_option("--levels", o.levels, "levels k, strictly increasing")->delimiter(',');
    app->add_option("--resolution", o.resolution, "domain resolution")->delimiter(',');
    app->add_option("--window", o.window, "interior window: minimum facet value in the moment image");
}

ExperimentConfig load_config(const ExperimentOptions& o, ExperimentConfig cfg)
{
    if(!o.config.empty()) {
        std::ifstream in(o.config);
        cfg = ExperimentConfig::from_json(nlohmann::json::parse(in));
    }
    if(!o.levels.empty())
        cfg.levels = o.levels;
    if(!o.resolution.empty())
        cfg.resolution = o.resolution;
    if(o.window > 0)
        cfg.window = o.window;
    if(!o.out.empty())
        cfg.output = o.out;
    cfg.validate();
    return cfg;
}

void write_outputs(const suites::ExperimentRun& run)
{
    const ExperimentConfig& cfg = run.config;
    if(cfg.output.empty())
        return;
    fs::create_directories(cfg.output);
    const fs::path base = fs::path(cfg.output) / cfg.name;
    {
        std::ofstream csv(base.string() + ".csv");
        write_report_csv(csv, run.report);
    }
    {
        std::ofstream dat(base.string() + ".dat");
        write_report_dat(dat, run.report);
    }
    std::ofstream(base.string() + ".json") << cfg.to_json().dump(2) << '\n';
    std::cout << "wrote " << base.string() << ".{csv,dat,json}\n";
}

void print_report(const suites::ExperimentRun& run)
{
    write_report_csv(std::cout, run.report);
    std::vector<double> c0;
    for(const auto& l : run.report.levels)
        c0.push_back(l.c0);
    if(c0.size() >= 4) {
        const RateFit fit = rate_fit(run.config.levels, c0);
        if(fit.exact)
            std::cout << "C0 rate: exact match\n";
        else
            std::cout << "C0 rate: slope " << fit.slope << " (r2 " << fit.r2 << ")\n";
    }
}

int finish(const std::vector<suites::CheckResult>& checks)
{
    bool ok = true;
    for(const auto& c : checks) {
        std::cout << suites::format(c) << '\n';
        ok = ok && c.passed;
    }
    return ok ? 0 : 1;
}

int run_flow(const std::string& out, std::size_t ny, int every)
{
    std::vector<suites::CheckResult> checks{suites::flow_duality()};
    if(!out.empty()) {
        fs::create_directories(out);
        const auto P = DelzantPolytope::preset("interval");
        const FlowState s0(DomainN::interval(ny), PolytopeGrid::uniform(P, 201, 0.002),
            [](const Vec& y, const Vec& x) {
                return x[0] * std::log(x[0]) + (1 - x[0]) * std::log(1 - x[0])
                    + 0.1 * x[0] * (1 - x[0]) * (y[0] + std::sin(std::numbers::pi * y[0]));
            });
        const double dtau = s0.max_step() / 4;
        const TensorGrid rho({linspace(-3, 3, 61)});
        const int steps = static_cast<int>(std::lround(0.01 / dtau));
        std::ofstream res(fs::path(out) / "flow_residual.csv");
        res << "step,tau,sup,mean\n";
        FlowState s = s0;
        for(int n = 0; n <= steps; n++) {
            const FlowState next = heat_evolve(s, dtau, 1);
            if(every > 0 && n % every == 0) {
                const auto rep = eells_sampson_residual(dual_family(s, rho), dual_family(next, rho), dtau);
                res << n << ',' << s.tau() << ',' << rep.sup << ',' << rep.mean << '\n';
                std::ofstream snap(fs::path(out) / ("snapshot_" + std::to_string(n) + ".txt"));
                write_snapshot(snap, s, ny / 2);
            }
            s = next;
        }
        std::cout << "wrote " << out << "/flow_residual.csv and snapshots\n";
    }
    return finish(checks);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bergman approximation of harmonic maps into toric Kähler potentials"};
    app.require_subcommand(1);

    ExperimentOptions geo_opt, disc_opt;
    auto* geo = app.add_subcommand("geodesic", "geodesic between FS and a perturbed metric on CP^1");
    add_experiment_options(geo, geo_opt);
    auto* disc = app.add_subcommand("disc", "harmonic disc with a loop of boundary metrics, HCMA residual");
    add_experiment_options(disc, disc_opt);

    std::string flow_out;
    std::vector<std::size_t> flow_res;
    int snapshot_every = 0;
    auto* flow = app.add_subcommand("flow-duality", "heat flow of potentials against the Eells-Sampson operator");
    flow->add_option("--out", flow_out, "directory for snapshots and residual history");
    flow->add_option("--resolution", flow_res, "y nodes of the interval")->delimiter(',');
    flow->add_option("--snapshot-every", snapshot_every, "write a snapshot every n steps")->check(CLI::NonNegativeNumber);

    std::vector<std::string> which;
    auto* diag = app.add_subcommand("diagnostics", "Szegő, localization, peak and ratio diagnostics");
    diag->add_option("checks", which, "subset of: szego localization peak-asymptotics ratio-bounds")
        ->check(CLI::IsMember({"szego", "localization", "peak-asymptotics", "ratio-bounds"}));

    auto* legendre = app.add_subcommand("legendre-check", "Legendre involution, gradient/Hessian duality and norming identities");

    CLI11_PARSE(app, argc, argv);

    try {
        if(*geo) {
            ExperimentConfig base = suites::geodesic_config();
            const auto run = suites::run_experiment(load_config(geo_opt, base));
            print_report(run);
            write_outputs(run);
            return finish({suites::geodesic_c0(run), suites::geodesic_derivatives(run)});
        }
        if(*disc) {
            const auto run = suites::run_experiment(load_config(disc_opt, suites::disc_config()));
            print_report(run);
            write_outputs(run);
            return finish({suites::disc_convergence(run), suites::hcma_convergence()});
        }
        if(*flow) {
            const std::size_t ny = flow_res.empty() ? 21 : flow_res.front();
            if(ny < 3)
                throw std::invalid_argument("--resolution needs at least 3 nodes");
            return run_flow(flow_out, ny, snapshot_every);
        }
        if(*diag) {
            auto wanted = [&](const std::string& s) {
                return which.empty() || std::find(which.begin(), which.end(), s) != which.end();
            };
            std::vector<suites::CheckResult> checks;
            if(wanted("szego"))
                checks.push_back(suites::szego_normalization());
            if(wanted("localization"))
                checks.push_back(suites::localization());
            if(wanted("peak-asymptotics"))
                checks.push_back(suites::peak_asymptotics());
            if(wanted("ratio-bounds"))
                checks.push_back(suites::ratio_bounds());
            return finish(checks);
        }
        if(*legendre)
            return finish({suites::legendre_involution(), suites::gradient_hessian_duality(),
                suites::norming_oracle(suites::beta_log_norming), suites::duality_identity()});
    } catch(const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
