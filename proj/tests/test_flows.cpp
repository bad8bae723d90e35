#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "toric/flows.h"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace toric;

namespace {

constexpr double PI = std::numbers::pi;

const DelzantPolytope& interval()
{
    static const auto P = DelzantPolytope::preset("interval");
    return P;
}

double u0(double x) { return x * std::log(x) + (1 - x) * std::log(1 - x); }

/// Phi(t, rho) of the geodesic u0 + a t x(1-x), sampled exactly
HarmonicFamily geodesic_family(double a, std::size_t ny, std::size_t nr)
{
    const TensorGrid yg({linspace(0, 1, ny)});
    const TensorGrid rg({linspace(-4, 4, nr)});
    HarmonicFamily f{yg, rg, {}};
    for(double t : yg.axis(0)) {
        const auto phi = legendre_dual(SymplecticPotential::perturbed(interval(), a * t));
        for(double r : rg.axis(0))
            f.values.push_back(phi.value(Vec::Constant(1, r)));
    }
    return f;
}

}  // namespace

TEST_CASE("constant data is stationary under the heat flow")
{
    const auto X = PolytopeGrid::uniform(interval(), 21, 0.02);
    const FlowState s0(DomainN::interval(11), X, [](const Vec&, const Vec& x) { return u0(x[0]) + 0.3; });
    const FlowState s1 = heat_evolve(s0, s0.max_step(), 50);
    CHECK(s1.tau() == doctest::Approx(50 * s0.max_step()));
    for(std::size_t y = 0; y < 11; y++)
        for(std::size_t x = 0; x < X.size(); x++)
            CHECK(s1.value(y, x) == doctest::Approx(s0.value(y, x)).epsilon(1e-14));
    CHECK_THROWS_AS(heat_evolve(s0, 1.01 * s0.max_step(), 1), std::invalid_argument);

    const auto Xs = PolytopeGrid::uniform(DelzantPolytope::preset("square"), 9, 0.05);
    const FlowState r0(DomainN::rectangle(linspace(0, 1, 6), linspace(0, 1, 5)), Xs,
        [](const Vec&, const Vec& x) { return u0(x[0]) + u0(x[1]); });
    const FlowState r1 = heat_evolve(r0, r0.max_step(), 10);
    for(std::size_t y = 0; y < 30; y++)
        CHECK(r1.value(y, 40) == doctest::Approx(r0.value(y, 40)).epsilon(1e-14));
    CHECK_THROWS_AS(FlowState(DomainN::disc({0.5}, 64), X, [](const Vec&, const Vec&) { return 0.0; }),
        std::invalid_argument);
}

TEST_CASE("sine mode decays at the separation-of-variables rate")
{
    const auto X = PolytopeGrid::uniform(interval(), 11, 0.05);
    const auto N = DomainN::interval(201);
    auto g = [](double x) { return 0.05 * x * (1 - x); };
    const FlowState s0(N, X, [&](const Vec& y, const Vec& x) { return std::sin(PI * y[0]) * g(x[0]) + u0(x[0]); });
    const double dt = s0.max_step();
    const int steps = static_cast<int>(std::round(0.1 / dt));
    const FlowState s1 = heat_evolve(s0, dt, steps);
    for(std::size_t x = 0; x < X.size(); x++) {
        const double xv = X.grid().node(x)[0];
        const double amp = (s1.value(100, x) - u0(xv)) / g(xv);
        CHECK(amp == doctest::Approx(std::exp(-PI * PI * s1.tau())).epsilon(0.01));
    }
    for(char c : s1.convex())
        CHECK(c);
    CHECK(s1.convexity_losses().empty());
}

TEST_CASE("long-time limit is the harmonic extension")
{
    const auto X = PolytopeGrid::uniform(interval(), 11, 0.05);
    const auto N = DomainN::interval(21);
    const FlowState s0(N, X, [](const Vec& y, const Vec& x) {
        return u0(x[0]) + 0.1 * x[0] * (1 - x[0]) * (y[0] + 3 * std::sin(2 * PI * y[0]));
    });
    const FlowState s1 = heat_evolve(s0, s0.max_step(), static_cast<int>(3.0 / s0.max_step()));
    for(std::size_t x = 0; x < X.size(); x++) {
        const std::vector<double> g{s0.value(0, x), s0.value(20, x)};
        const auto h = harmonic_extend(N, g);
        for(std::size_t y = 0; y < N.size(); y++)
            CHECK(std::fabs(s1.value(y, x) - h[y]) < 1e-6);
    }
}

TEST_CASE("convexity loss is flagged, not repaired")
{
    const auto X = PolytopeGrid::uniform(interval(), 21, 0.02);
    // concave initial interior data with convex boundary slices
    const FlowState s0(DomainN::interval(5), X, [](const Vec& y, const Vec& x) {
        const bool edge = y[0] == 0 || y[0] == 1;
        return edge ? u0(x[0]) : -10 * x[0] * x[0];
    });
    CHECK_FALSE(s0.convex()[2]);
    CHECK_FALSE(s0.convexity_losses().empty());
    CHECK(s0.convexity_losses().front().tau == 0.0);
}

TEST_CASE("snapshot export carries tau")
{
    const auto X = PolytopeGrid::uniform(interval(), 11, 0.05);
    const FlowState s0(DomainN::interval(5), X, [](const Vec& y, const Vec& x) { return u0(x[0]) + 0.1 * y[0] * x[0]; });
    const FlowState s1 = heat_evolve(s0, s0.max_step(), 3);
    std::stringstream ss;
    write_snapshot(ss, s1, 2);
    const auto f = read_potential(ss);
    REQUIRE(f.tau);
    CHECK(*f.tau == doctest::Approx(s1.tau()));
    CHECK(f.symplectic->value(X.grid().node(4)) == doctest::Approx(s1.value(2, 4)).epsilon(1e-13));
}

TEST_CASE("Eells-Sampson residual")
{
    SUBCASE("y-independent family")
    {
        const auto f = geodesic_family(0.0, 11, 41);
        CHECK(eells_sampson_residual(f).sup < 1e-12);
    }
    SUBCASE("Legendre duals of a harmonic family converge at second order")
    {
        const auto coarse = eells_sampson_residual(geodesic_family(0.1, 11, 41));
        const auto fine = eells_sampson_residual(geodesic_family(0.1, 21, 81));
        CHECK(coarse.sup > 0);
        CHECK(coarse.sup / fine.sup == doctest::Approx(4).epsilon(0.25));
        CHECK(fine.y_spacing == doctest::Approx(0.05));
        CHECK(fine.rho_spacing == doctest::Approx(0.1));
    }
}

TEST_CASE("heat flow and its dual: sign relation and duality residual")
{
    const auto X = PolytopeGrid::uniform(interval(), 201, 0.002);
    const auto N = DomainN::interval(11);
    const FlowState s0(N, X, [](const Vec& y, const Vec& x) {
        return u0(x[0]) + 0.1 * x[0] * (1 - x[0]) * (y[0] + std::sin(PI * y[0]));
    });
    const double dt = s0.max_step() / 4;
    const FlowState s1 = heat_evolve(s0, dt, 1);
    const TensorGrid rho({linspace(-3, 3, 31)});
    const auto f0 = dual_family(s0, rho), f1 = dual_family(s1, rho);
    // d_tau u(x) = -d_tau Phi(rho(x))
    for(std::size_t y : {3, 5, 7})
        for(std::size_t r = 5; r < 26; r += 5) {
            const Vec rv = rho.node(r);
            const Vec x = invert_symplectic_gradient(s0.potential(y), rv);
            const double du = (s1.potential(y).value(x) - s0.potential(y).value(x)) / dt;
            const double dphi = (f1.at(y, r) - f0.at(y, r)) / dt;
            CHECK(std::fabs(du + dphi) < 1e-3 * std::max(1.0, std::fabs(du)));
        }
    const auto rep = eells_sampson_residual(f0, f1, dt);
    CHECK(rep.count > 0);
    CHECK(rep.sup < 0.05);
}

TEST_CASE("HCMA residual")
{
    const TensorGrid yg({linspace(-1, 1, 9), linspace(-1, 1, 9)});
    const TensorGrid rg({linspace(-3, 3, 25)});
    auto build = [&](auto fn) {
        HarmonicFamily f{yg, rg, {}};
        for(std::size_t y = 0; y < yg.size(); y++)
            for(std::size_t r = 0; r < rg.size(); r++)
                f.values.push_back(fn(yg.node(y), rg.axis(0)[r]));
        return f;
    };
    auto fs = [](double r) { return std::log1p(std::exp(r)); };
    const auto still = build([&](const Vec&, double r) { return fs(r); });
    CHECK(hcma_residual(still).sup < 1e-12);
    CHECK(hcma_residual(still).positivity_violations == 0);
    const auto affine = build([&](const Vec& y, double r) { return fs(r) + 0.3 * y[0] - 0.7 * y[1]; });
    CHECK(hcma_residual(affine).sup < 1e-12);
    // NaN outside the unit disc is skipped
    const auto disc = build([&](const Vec& y, double r) {
        return y.norm() > 1 ? std::numeric_limits<double>::quiet_NaN() : fs(r) + 0.2 * y[0];
    });
    const auto rep = hcma_residual(disc);
    CHECK(rep.count > 0);
    CHECK(rep.sup < 1e-12);
    // a concave fibre is reported
    const auto bad = build([&](const Vec&, double r) { return -r * r; });
    CHECK(hcma_residual(bad).positivity_violations > 0);
    // pointwise relation to the harmonic map operator
    const auto curved = build([&](const Vec& y, double r) { return fs(r + 0.3 * y[0] * y[1]) + 0.1 * y[0] * r; });
    const auto h = hcma_field(curved), e = eells_sampson_field(curved);
    for(std::size_t i = 0; i < h.size(); i++)
        if(std::isfinite(h[i]) && std::isfinite(e[i])) {
            const std::size_t y = i / rg.size(), r = i % rg.size();
            const double prr = fd_second(0.25, 0.25, curved.at(y, r - 1), curved.at(y, r), curved.at(y, r + 1));
            CHECK(h[i] == doctest::Approx(e[i] * prr).epsilon(1e-10).scale(1e-12));
        }
}
