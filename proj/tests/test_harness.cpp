#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "toric/harness.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace toric;

namespace {

double u0(double x) { return x * std::log(x) + (1 - x) * std::log(1 - x); }

Vec v1(double a) { return Vec::Constant(1, a); }

ExperimentConfig small_geodesic(std::vector<int> levels = {4, 8})
{
    ExperimentConfig c;
    c.resolution = {11};
    c.levels = std::move(levels);
    c.rho_points = 121;
    c.rho_min = -6;
    c.rho_max = 6;
    return c;
}

}  // namespace

TEST_CASE("family specifications")
{
    CHECK(parse_family("geodesic(0.25)") == std::pair<std::string, double>{"geodesic", 0.25});
    CHECK(parse_family("loop") == std::pair<std::string, double>{"loop", 0.1});
    CHECK(parse_family(" loop( -0.05 ) ").second == -0.05);
    CHECK_THROWS_AS(parse_family("loop(abc)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_family("loop(0.1"), std::invalid_argument);
}

TEST_CASE("experiment configs validate and round trip")
{
    const auto c = ExperimentConfig::from_json({{"domain", "disc"}, {"levels", {8, 16}}});
    CHECK(c.family == "loop(0.1)");
    CHECK(c.resolution == std::vector<std::size_t>{4, 128});
    const auto back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());

    CHECK_THROWS_AS(ExperimentConfig::from_json({{"levels", {8, 8}}}), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"levels", {16, 8}}}), std::invalid_argument);
    // window inside the boundary margin 1/(4 k_max)
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"levels", {8, 16}}, {"window", 0.01}}), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"domain", "annulus"}}), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"domain", "disc"}, {"resolution", {4, 99}}}),
        std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"family", "geodesic(x)"}}), std::invalid_argument);
    // families are tied to their domains
    ExperimentConfig wrong = small_geodesic();
    wrong.family = "loop(0.1)";
    CHECK_THROWS_AS(solve_harmonic_map(wrong), std::invalid_argument);
}

TEST_CASE("interval: equal endpoints give a constant family")
{
    ExperimentConfig c = small_geodesic();
    c.boundary = {"perturbed(0.1)", "perturbed(0.1)"};
    const auto map = solve_harmonic_map(c);
    const std::size_t nr = map.rho.size();
    for(std::size_t y = 1; y < map.domain.size(); y++)
        for(std::size_t r = 0; r < nr; r++)
            CHECK(map.at(y, r) == doctest::Approx(map.at(0, r)).epsilon(1e-13));
    const auto A = build_approximant(map, 6);
    for(std::size_t y = 1; y < map.domain.size(); y++)
        for(std::size_t r = 0; r < nr; r++)
            CHECK(A.values[y * nr + r] == doctest::Approx(A.values[r]).epsilon(1e-13));
}

TEST_CASE("interval: the solution is the Legendre-linear geodesic")
{
    const auto map = solve_harmonic_map(small_geodesic());
    for(std::size_t y = 0; y < map.domain.size(); y++) {
        const double t = map.domain.node(y)[0];
        for(double x : linspace(0.001, 0.999, 101)) {
            const double direct = (1 - t) * u0(x) + t * (u0(x) + 0.1 * x * (1 - x));
            CHECK(std::fabs(map.u[y].value(x) - direct) < 1e-10);
        }
        // Phi is the Legendre dual of the slice
        for(std::size_t r = 0; r < map.rho.size(); r += 10) {
            const double rho = map.rho.axis(0)[r];
            const Vec x = invert_symplectic_gradient(map.u[y], v1(rho));
            CHECK(map.at(y, r) == doctest::Approx(x[0] * rho - map.u[y].value(x)).epsilon(1e-12));
            CHECK(map.depth[y * map.rho.size() + r] == doctest::Approx(std::min(x[0], 1 - x[0])).epsilon(1e-9));
        }
    }
}

TEST_CASE("interval: exponents are linear in t")
{
    const auto map = solve_harmonic_map(small_geodesic());
    const auto A = build_approximant(map, 8);
    const auto& t0 = A.boundary_tables[0];
    const auto& t1 = A.boundary_tables[1];
    for(std::size_t y = 0; y < map.domain.size(); y++) {
        const double t = map.domain.node(y)[0];
        for(std::size_t a = 0; a < A.norming.size(); a++)
            CHECK(A.norming.lambda[a][y] == doctest::Approx((1 - t) * t0.log_q[a] + t * t1.log_q[a]).epsilon(1e-13));
    }
}

TEST_CASE("disc: loop family extends to the closed form")
{
    const auto c = ExperimentConfig::from_json({{"domain", "disc"}, {"family", "loop(0.05)"},
        {"resolution", {3, 128}}, {"levels", {4}}, {"rho", {{"points", 11}}}});
    const auto map = solve_harmonic_map(c);
    for(std::size_t i = 0; i < map.domain.size(); i++) {
        const Vec y = map.domain.node(i);
        for(double x : {0.05, 0.3, 0.5, 0.8}) {
            const double expect = u0(x) + 0.05 * (1 + y[0]) * x * (1 - x);
            CHECK(std::fabs(map.u[i].value(x) - expect) < 1e-12);
        }
    }
}

TEST_CASE("rectangle: sheet family extends exactly")
{
    const auto c = ExperimentConfig::from_json({{"domain", "rectangle"}, {"family", "sheet(0.1)"},
        {"resolution", {6, 5}}, {"levels", {4}}, {"rho", {{"points", 11}}}});
    const auto map = solve_harmonic_map(c);
    for(std::size_t i = 0; i < map.domain.size(); i++) {
        const Vec q = map.domain.node(i);
        for(double x : {0.1, 0.5, 0.7})
            CHECK(std::fabs(map.u[i].value(x) - (u0(x) + 0.1 * (1 + q[0] * q[1]) * x * (1 - x))) < 1e-10);
    }
    const auto rep = error_report(map, build_approximants(c, map), 0.1);
    CHECK(rep.domain == "rectangle");
    CHECK(std::isfinite(rep.levels[0].c2_yy));
}

TEST_CASE("non-convex boundary data is rejected with its location")
{
    ExperimentConfig c = small_geodesic();
    c.boundary = {"guillemin", "perturbed(3)"};
    CHECK_THROWS_AS(solve_harmonic_map(c), NumericalError);
    try {
        solve_harmonic_map(c);
    } catch(const NumericalError& e) {
        CHECK(std::string(e.what()).find("y node") != std::string::npos);
    }
}

TEST_CASE("boundary potentials from files")
{
    const auto P = DelzantPolytope::preset("interval");
    const auto grid = PolytopeGrid::uniform(P, 401, 1e-3);
    std::vector<double> f;
    for(std::size_t i = 0; i < grid.size(); i++) {
        const double x = grid.grid().node(i)[0];
        f.push_back(0.1 * x * (1 - x));
    }
    const std::string path = "test_harness_potential.txt";
    {
        std::ofstream out(path);
        write_potential(out, SymplecticPotential::sampled(grid, f), grid);
    }
    ExperimentConfig c = small_geodesic();
    c.boundary = {"guillemin", "file:" + path};
    const auto from_file = solve_harmonic_map(c);
    const auto closed = solve_harmonic_map(small_geodesic());
    for(std::size_t i = 0; i < closed.phi.size(); i++)
        CHECK(from_file.phi[i] == doctest::Approx(closed.phi[i]).epsilon(1e-9));
    std::remove(path.c_str());
    c.boundary = {"guillemin", "file:/nonexistent/potential.txt"};
    CHECK_THROWS(solve_harmonic_map(c));
    c.boundary = {"guillemin"};
    CHECK_THROWS_AS(solve_harmonic_map(c), std::invalid_argument);
}

TEST_CASE("error norms: injected solutions")
{
    const auto map = solve_harmonic_map(small_geodesic());
    const auto exact = level_errors(map, map.phi, 8, 0.1);
    CHECK(exact.c0 == 0.0);
    CHECK(exact.c0_raw == 0.0);
    CHECK(exact.c1_y == 0.0);
    CHECK(exact.c1_rho == 0.0);
    CHECK(exact.c2_rhorho == 0.0);
    CHECK(exact.c2_yrho == 0.0);
    CHECK(exact.c2_yy == 0.0);

    std::vector<double> shifted = map.phi;
    for(double& v : shifted)
        v += 0.75;
    const auto s = level_errors(map, shifted, 8, 0.1);
    CHECK(s.c0 < 1e-14);
    CHECK(s.c0_raw == doctest::Approx(0.75));
    CHECK(s.c1_y < 1e-10);
    CHECK(s.c1_rho < 1e-10);
    CHECK(s.c2_rhorho < 1e-8);
    CHECK(s.c2_yrho < 1e-8);
    CHECK(s.c2_yy < 1e-8);

    CHECK_THROWS_AS(level_errors(map, std::vector<double>(3, 0.0), 8, 0.1), std::invalid_argument);
}

TEST_CASE("error norms shrink with the window and the pipeline is deterministic")
{
    const auto cfg = small_geodesic({4, 8, 16});
    const auto map = solve_harmonic_map(cfg);
    const auto approx = build_approximants(cfg, map);
    const auto wide = error_report(map, approx, 0.1), narrow = error_report(map, approx, 0.2);
    for(std::size_t i = 0; i < wide.levels.size(); i++) {
        const auto& w = wide.levels[i];
        const auto& n = narrow.levels[i];
        CHECK(n.c0 <= w.c0);
        CHECK(n.c0_raw <= w.c0_raw);
        CHECK(n.c1_y <= w.c1_y);
        CHECK(n.c1_rho <= w.c1_rho);
        CHECK(n.c2_rhorho <= w.c2_rhorho);
        CHECK(n.c2_yrho <= w.c2_yrho);
        CHECK(n.c2_yy <= w.c2_yy);
        CHECK(w.c0 >= 0);
    }
    std::ostringstream a, b;
    write_report_csv(a, wide);
    const auto map2 = solve_harmonic_map(cfg);
    write_report_csv(b, error_report(map2, build_approximants(cfg, map2), 0.1));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("k,C0,C1_y,C1_rho,C2_rhorho,C2_yrho,C2_yy\n", 0) == 0);
    std::ostringstream dat;
    write_report_dat(dat, wide);
    CHECK(dat.str().find("C0_raw") != std::string::npos);
}

TEST_CASE("disc reports leave y-derivatives undefined")
{
    const auto c = ExperimentConfig::from_json({{"domain", "disc"}, {"family", "loop(0.05)"},
        {"resolution", {2, 64}}, {"levels", {4}}, {"rho", {{"points", 41}}}});
    const auto map = solve_harmonic_map(c);
    const auto rep = error_report(map, build_approximants(c, map), 0.1);
    CHECK(std::isnan(rep.levels[0].c1_y));
    CHECK(std::isnan(rep.levels[0].c2_yy));
    CHECK(rep.levels[0].c1_rho > 0);
}

TEST_CASE("rate fits")
{
    const std::vector<int> k{8, 16, 32, 64, 128};
    std::vector<double> logk, half, zero(k.size(), 0.0);
    for(int n : k) {
        logk.push_back(std::log(n) / n);
        half.push_back(std::pow(n, -0.5));
    }
    const auto f1 = rate_fit(k, logk);
    CHECK(f1.flatness < 1e-10);
    CHECK(f1.sse_logk_over_k < 1e-20);
    const auto f2 = rate_fit(k, half);
    CHECK(f2.slope == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(f2.r2 == doctest::Approx(1.0));
    CHECK(f2.sse_power < 1e-20);
    CHECK(f2.sse_logk_over_k > 0);
    CHECK(rate_fit(k, zero).exact);
    CHECK_THROWS_AS(rate_fit(std::vector<int>{8, 16, 32}, std::vector<double>{1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(rate_fit(std::vector<int>{8, 16, 32, 64}, std::vector<double>{1, -2, 3, 4}),
        std::invalid_argument);
}

TEST_CASE("measured geodesic C0 errors decay faster than k^-0.8")
{
    ExperimentConfig cfg;
    const auto map = solve_harmonic_map(cfg);
    const auto rep = error_report(map, build_approximants(cfg, map), cfg.window);
    std::vector<double> c0;
    for(const auto& l : rep.levels)
        c0.push_back(l.c0);
    const auto fit = rate_fit(cfg.levels, c0);
    CHECK(!fit.exact);
    CHECK(fit.slope <= -0.8);
}

TEST_CASE("disc Poisson exponents agree along two quadrature paths")
{
    const auto c = ExperimentConfig::from_json({{"domain", "disc"}, {"family", "loop(0.05)"},
        {"resolution", {2, 128}}, {"levels", {6}}, {"rho", {{"points", 11}}}});
    const auto map = solve_harmonic_map(c);
    const auto A = build_approximant(map, 6, c.quadrature);
    const std::vector<std::size_t> nodes{0, map.domain.disc_index(0, 9), map.domain.disc_index(1, 100)};
    CHECK(poisson_exponent_crosscheck(c, map, A, nodes) < 1e-8);
    CHECK_THROWS_AS(poisson_exponent_crosscheck(c, map, A, {map.domain.disc_index(2, 0)}), std::invalid_argument);
}
