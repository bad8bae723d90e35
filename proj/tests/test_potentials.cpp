#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.h"
#include "toric/potentials.h"

#include <cmath>
#include <random>
#include <sstream>

using namespace toric;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

const DelzantPolytope& interval()
{
    static const auto P = DelzantPolytope::preset("interval");
    return P;
}

}  // namespace

TEST_CASE("Guillemin potential values")
{
    CHECK(guillemin_potential(interval(), std::vector<double>{0.5}) == doctest::Approx(-std::log(2.0)));
    CHECK(guillemin_potential(interval(), std::vector<double>{1e-8}) == doctest::Approx(-1.84e-7).epsilon(1e-2));
    CHECK(guillemin_potential(DelzantPolytope::preset("simplex2"), std::vector<double>{1.0 / 3, 1.0 / 3})
        == doctest::Approx(-std::log(3.0)));
    CHECK_THROWS_AS(guillemin_potential(interval(), std::vector<double>{0.0}), std::domain_error);
    CHECK_THROWS_AS(guillemin_potential(interval(), std::vector<double>{1.2}), std::domain_error);
}

TEST_CASE("to_symplectic examples")
{
    const auto grid = PolytopeGrid::uniform(interval(), 201, 0.01);
    SUBCASE("quadratic is self-dual")
    {
        const DelzantPolytope box({{{1}, Rational(1)}, {{-1}, Rational(1)}});
        const auto g = PolytopeGrid::uniform(box, 101, 0.0);
        const auto u = to_symplectic(KahlerPotential::quadratic(1), g, 0.0);
        CHECK(u.value(0.3) == doctest::Approx(0.045).epsilon(1e-12));
    }
    SUBCASE("Fubini-Study gives the Guillemin potential")
    {
        const auto u = to_symplectic(KahlerPotential::fubini_study(), grid);
        CHECK(u.value(0.5) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
        auto fs = [](double r) { return std::log1p(std::exp(r)); };
        for(int i = 1; i <= 10; i++) {
            const double x = i / 11.0;
            const double ref = oracle::conjugate_by_maximisation(fs, x, -30, 30);
            CHECK(u.value(x) == doctest::Approx(ref).epsilon(1e-9));
            CHECK(std::fabs(u.smooth_jet(v1(x)).value) < 1e-12);
        }
    }
    SUBCASE("adding a constant to phi shifts u by its negative")
    {
        const auto u0 = to_symplectic(KahlerPotential::fubini_study(), grid);
        const auto u2 = to_symplectic(KahlerPotential::fubini_study().shifted(2.0), grid);
        for(double x : {0.1, 0.37, 0.8})
            CHECK(u2.value(x) - u0.value(x) == doctest::Approx(-2.0).epsilon(1e-12));
    }
}

TEST_CASE("to_kahler examples")
{
    const auto rgrid = TensorGrid::uniform(1, -5, 5, 101);
    SUBCASE("quadratic")
    {
        const DelzantPolytope box({{{1}, Rational(10)}, {{-1}, Rational(10)}});
        SymplecticPotential u(box, 0.0);
        u = u.with_term(1.0, custom_basis([](const Vec& x) {
            return Jet{0.5 * x.squaredNorm(), x, Mat::Identity(1, 1)};
        }, "x^2/2"));
        const auto phi = to_kahler(u, rgrid);
        for(std::size_t i = 0; i < rgrid.size(); i += 10)
            CHECK(phi.values()[i] == doctest::Approx(0.5 * std::pow(rgrid.axis(0)[i], 2)).epsilon(1e-12));
    }
    SUBCASE("Guillemin gives Fubini-Study with zero constant")
    {
        const auto phi = to_kahler(SymplecticPotential::guillemin(interval()), rgrid);
        CHECK(phi.value(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        for(std::size_t i = 0; i < rgrid.size(); i++)
            CHECK(phi.values()[i] == doctest::Approx(std::log1p(std::exp(rgrid.axis(0)[i]))).epsilon(1e-12));
    }
}

TEST_CASE("Legendre involution on a sampled Fubini-Study potential")
{
    const auto rgrid = TensorGrid::uniform(1, -12, 12, 2001);
    std::vector<double> vals;
    for(double r : rgrid.axis(0))
        vals.push_back(std::log1p(std::exp(r)));
    const auto phi = KahlerPotential::sampled(rgrid, vals);
    const auto xgrid = PolytopeGrid::uniform(interval(), 2001, 1e-5);
    const auto u = to_symplectic(phi, xgrid);
    const auto back = to_kahler(u, rgrid);
    double err = 0;
    for(std::size_t i = 5; i + 5 < rgrid.size(); i++)
        err = std::max(err, std::fabs(back.values()[i] - vals[i]));
    CHECK(err < 1e-8);
}

TEST_CASE("moment map examples")
{
    const auto fs = KahlerPotential::fubini_study();
    CHECK(moment_map(fs, v1(0))[0] == doctest::Approx(0.5));
    CHECK(moment_map(fs, v1(-20))[0] < 1e-8);
    CHECK(moment_map(KahlerPotential::quadratic(1), v1(0.7))[0] == doctest::Approx(0.7));
}

TEST_CASE("Abreu delta")
{
    const auto u0 = SymplecticPotential::guillemin(interval());
    CHECK(abreu_delta(u0, v1(0.3)) == doctest::Approx(1.0).epsilon(1e-14));
    const auto up = SymplecticPotential::perturbed(interval(), 0.1);
    CHECK(abreu_delta(up, v1(0.5)) == doctest::Approx(1.0 / (3.8 * 0.25)).epsilon(1e-14));
    // FD cross-check of the perturbed Hessian
    const double h = 1e-4;
    const double d2 = (up.value(0.5 + h) - 2 * up.value(0.5) + up.value(0.5 - h)) / (h * h);
    CHECK(d2 == doctest::Approx(3.8).epsilon(1e-6));

    // delta of u0 is identically 1, including nodes at the boundary margin
    const double eps = boundary_margin(64);
    for(auto name : {"interval", "square", "simplex2"}) {
        const auto P = DelzantPolytope::preset(name);
        const auto grid = PolytopeGrid::uniform(P, 21, eps);
        const auto u = SymplecticPotential::guillemin(P);
        for(std::size_t i = 0; i < grid.size(); i++)
            if(grid.valid(i))
                CHECK(std::fabs(abreu_delta(u, grid.grid().node(i)) - 1) < 1e-4);
    }
    // positivity for a perturbed 2D potential
    const auto S = DelzantPolytope::preset("simplex2");
    const auto us = SymplecticPotential::perturbed(S, 0.5);
    const auto grid = PolytopeGrid::uniform(S, 25, 0.01);
    for(std::size_t i = 0; i < grid.size(); i++)
        if(grid.valid(i))
            CHECK(abreu_delta(us, grid.grid().node(i)) > 0);
}

TEST_CASE("gradient and Hessian duality at random interior pairs")
{
    const auto P = DelzantPolytope::preset("square");
    const auto u = SymplecticPotential::perturbed(P, 0.3);
    const auto phi = legendre_dual(u);
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> U(-4, 4);
    const double h = 1e-3;
    for(int t = 0; t < 100; t++) {
        const Vec rho = v2(U(gen), U(gen));
        const Vec x = moment_map(phi, rho);
        CHECK(P.min_facet_value(as_span(x)) > 0);
        CHECK((u.jet(x).grad - rho).cwiseAbs().maxCoeff() < 1e-6);
        // FD Hessian of phi from values only
        Mat H(2, 2);
        for(int a = 0; a < 2; a++)
            for(int b = 0; b < 2; b++) {
                Vec ea = Vec::Zero(2), eb = Vec::Zero(2);
                ea[a] = h;
                eb[b] = h;
                H(a, b) = (phi.value(rho + ea + eb) - phi.value(rho + ea - eb) - phi.value(rho - ea + eb)
                    + phi.value(rho - ea - eb)) / (4 * h * h);
            }
        CHECK((H.inverse() - u.jet(x).hess).cwiseAbs().maxCoeff() < 1e-4 * std::max(1.0, u.jet(x).hess.norm()));
    }
}

TEST_CASE("sampled potentials stay convex")
{
    const auto S = DelzantPolytope::preset("square");
    const auto grid = PolytopeGrid::uniform(S, 31, 0.02);
    std::vector<double> f;
    for(std::size_t i = 0; i < grid.size(); i++) {
        const Vec x = grid.grid().node(i);
        f.push_back(0.2 * x[0] * (1 - x[0]) * x[1] * (1 - x[1]));
    }
    const auto u = SymplecticPotential::sampled(grid, f);
    for(std::size_t i = 0; i < grid.size(); i++)
        CHECK(is_positive_definite(u.jet(grid.grid().node(i)).hess));
    const auto phi = to_kahler(u, TensorGrid::uniform(2, -3, 3, 13));
    CHECK(phi.convexity_failures().empty());
}

TEST_CASE("2D inversions round trip")
{
    const auto S = DelzantPolytope::preset("simplex2");
    const auto u = SymplecticPotential::perturbed(S, 0.2);
    const auto phi = to_kahler(u, TensorGrid::uniform(2, -4, 4, 17));
    for(std::size_t i = 0; i < phi.grid().size(); i += 7) {
        const Vec rho = phi.grid().node(i);
        const Vec x = invert_symplectic_gradient(u, rho);
        CHECK((invert_moment_map(legendre_dual(u), x) - rho).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("presets")
{
    CHECK(symplectic_preset("guillemin", interval()).value(0.5) == doctest::Approx(-std::log(2.0)));
    CHECK(symplectic_preset("fubini-study", interval()).value(0.25)
        == doctest::Approx(guillemin_potential(interval(), std::vector<double>{0.25})));
    CHECK(symplectic_preset("perturbed(0.1)", interval()).value(0.5)
        == doctest::Approx(-std::log(2.0) + 0.025));
    CHECK_THROWS_AS(symplectic_preset("perturbed(x)", interval()), std::invalid_argument);
    CHECK_THROWS_AS(symplectic_preset("nope", interval()), std::invalid_argument);
}

TEST_CASE("text serialization round trip")
{
    SUBCASE("Kähler with tau")
    {
        const auto grid = TensorGrid::uniform(1, -3, 3, 41);
        const auto phi = to_kahler(SymplecticPotential::perturbed(interval(), 0.1), grid);
        std::stringstream ss;
        write_potential(ss, phi, 0.25);
        const PotentialFile f = read_potential(ss);
        CHECK(f.kind == "kahler");
        REQUIRE(f.tau);
        CHECK(*f.tau == 0.25);
        REQUIRE(f.kahler);
        CHECK(f.kahler->values() == phi.values());
        CHECK(f.kahler->grid() == grid);
    }
    SUBCASE("symplectic")
    {
        const auto P = DelzantPolytope::preset("square");
        const auto grid = PolytopeGrid::uniform(P, 11, 0.05);
        const auto u = SymplecticPotential::perturbed(P, 0.3);
        std::stringstream ss;
        write_potential(ss, u, grid);
        const PotentialFile f = read_potential(ss);
        REQUIRE(f.symplectic);
        for(std::size_t i = 0; i < grid.size(); i++) {
            const Vec x = grid.grid().node(i);
            CHECK(f.symplectic->value(x) == doctest::Approx(u.value(x)).epsilon(1e-14));
        }
    }
    std::stringstream bad("not a potential\n");
    CHECK_THROWS_AS(read_potential(bad), std::invalid_argument);
}
