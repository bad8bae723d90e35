/// Runs the acceptance criteria and prints one pass/fail line per criterion.
/// Exit status is the number of failed criteria.

#include "toric/suites.h"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace toric;

namespace {

/// frozen reference values (k, alpha) -> log Q from an mpmath quadrature
std::map<std::pair<int, int>, double> read_oracle(const std::string& path)
{
    std::ifstream in(path);
    if(!in)
        throw std::runtime_error("cannot open oracle table " + path);
    std::map<std::pair<int, int>, double> table;
    std::string line;
    std::getline(in, line);
    while(std::getline(in, line)) {
        std::istringstream row(line);
        std::string k, a, v;
        std::getline(row, k, ',');
        std::getline(row, a, ',');
        std::getline(row, v);
        table[{std::stoi(k), std::stoi(a)}] = std::stod(v);
    }
    return table;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::string oracle_path = argc > 1 ? argv[1] : FS_ORACLE_PATH;
    const auto oracle = read_oracle(oracle_path);

    std::vector<suites::CheckResult> results;
    auto report = [&](suites::CheckResult r) {
        std::cout << suites::format(r) << std::endl;
        results.push_back(std::move(r));
    };
    auto guarded = [&](int id, const char* name, auto fn) {
        try {
            report(fn());
        } catch(const std::exception& e) {
            report({id, name, false, std::string("exception: ") + e.what(), 0});
        }
    };

    guarded(1, "legendre-involution", suites::legendre_involution);
    guarded(2, "gradient-hessian-duality", suites::gradient_hessian_duality);
    guarded(3, "norming-oracle", [&] {
        return suites::norming_oracle([&](int k, int a) { return oracle.at({k, a}); });
    });
    guarded(4, "duality-identity", suites::duality_identity);
    guarded(5, "szego-normalization", suites::szego_normalization);
    try {
        const auto run = suites::run_experiment(suites::geodesic_config());
        report(suites::geodesic_c0(run));
        report(suites::geodesic_derivatives(run));
    } catch(const std::exception& e) {
        report({6, "geodesic-c0", false, std::string("exception: ") + e.what(), 0});
        report({7, "geodesic-derivatives", false, std::string("exception: ") + e.what(), 0});
    }
    guarded(8, "disc-convergence", [] { return suites::disc_convergence(suites::run_experiment(suites::disc_config())); });
    guarded(9, "hcma-residual", suites::hcma_convergence);
    guarded(10, "flow-duality", suites::flow_duality);
    guarded(11, "ratio-bounds", suites::ratio_bounds);
    guarded(12, "peak-asymptotics", suites::peak_asymptotics);
    guarded(13, "localization", suites::localization);

    int failed = 0;
    for(const auto& r : results)
        failed += r.passed ? 0 : 1;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
    return failed;
}
