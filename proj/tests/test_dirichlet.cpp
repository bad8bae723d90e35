#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "toric/dirichlet.h"
#include "toric/grid.h"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace toric;

namespace {

constexpr double PI = std::numbers::pi;

std::vector<double> boundary_values(const DomainN& N, double (*g)(const Vec&))
{
    std::vector<double> out;
    for(std::size_t b : N.boundary_nodes())
        out.push_back(g(N.node(b)));
    return out;
}

}  // namespace

TEST_CASE("Poisson kernel values and normalisation")
{
    CHECK(poisson_kernel(0, 1.3) == doctest::Approx(1 / (2 * PI)));
    CHECK(poisson_kernel(0.5, 0) == doctest::Approx(3 / (2 * PI)));
    double s = 0;
    for(int j = 0; j < 512; j++)
        s += poisson_kernel(0.9, 2 * PI * j / 512) * (2 * PI / 512);
    CHECK(std::fabs(s - 1) < 1e-10);
    CHECK_THROWS_AS(poisson_kernel(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_kernel(-0.1, 0), std::invalid_argument);
}

TEST_CASE("interval extension is linear")
{
    const auto N = DomainN::interval(9);
    const std::vector<double> g{2, 6};
    const auto f = harmonic_extend(N, g);
    CHECK(f[4] == doctest::Approx(4));
    CHECK(laplace_residual(N, f) < 1e-14);
}

TEST_CASE("disc extension of harmonic polynomials")
{
    const auto N = DomainN::disc(linspace(0.1, 0.9, 9), 256);
    const auto f = harmonic_extend(N, boundary_values(N, [](const Vec& p) { return p[0]; }));
    for(std::size_t i = 0; i < N.size(); i++)
        CHECK(f[i] == doctest::Approx(N.node(i)[0]).epsilon(1e-12).scale(1));
    // r = 0.5 ring, angle 0 is u = 0.5
    CHECK(f[N.disc_index(4, 0)] == doctest::Approx(0.5).epsilon(1e-12));

    const auto c = harmonic_extend(N, std::vector<double>(N.angle_count(), 5.0));
    for(double v : c)
        CHECK(v == doctest::Approx(5.0).epsilon(1e-13));

    // Re z^3 = r^3 cos 3 gamma
    const auto f3 = harmonic_extend(N, boundary_values(N, [](const Vec& p) {
        return p[0] * p[0] * p[0] - 3 * p[0] * p[1] * p[1];
    }));
    for(std::size_t i = 0; i < N.size(); i++) {
        const Vec p = N.node(i);
        CHECK(std::fabs(f3[i] - (p[0] * p[0] * p[0] - 3 * p[0] * p[1] * p[1])) < 1e-10);
    }
}

TEST_CASE("disc Laplace residual converges at second order")
{
    auto residual = [](std::size_t rings, std::size_t angles) {
        const auto N = DomainN::disc(linspace(0.1, 0.9, rings), angles);
        std::vector<double> f(N.size());
        for(std::size_t i = 0; i < N.size(); i++)
            f[i] = N.node(i)[0];
        return laplace_residual(N, f);
    };
    const double r1 = residual(9, 64), r2 = residual(17, 128);
    CHECK(r1 / r2 == doctest::Approx(4).epsilon(0.1));
}

TEST_CASE("rectangle solve")
{
    const auto N = DomainN::rectangle(linspace(0, 2, 21), {0.0, 0.1, 0.25, 0.4, 0.6, 0.7, 1.0});
    // x^2 - y^2 is reproduced exactly by the 5-point stencil on a tensor grid
    const auto g = boundary_values(N, [](const Vec& p) { return p[0] * p[0] - p[1] * p[1]; });
    const auto f = harmonic_extend(N, g);
    for(std::size_t i = 0; i < N.size(); i++) {
        const Vec p = N.node(i);
        CHECK(f[i] == doctest::Approx(p[0] * p[0] - p[1] * p[1]).epsilon(1e-10).scale(1));
    }
    CHECK(laplace_residual(N, f) <= 1e-10);

    // generic data: maximum principle and boundary consistency
    const auto g2 = boundary_values(N, [](const Vec& p) { return std::sin(3 * p[0]) * std::exp(p[1]); });
    const auto f2 = harmonic_extend(N, g2);
    CHECK(laplace_residual(N, f2) <= 1e-10);
    const auto [lo, hi] = std::minmax_element(g2.begin(), g2.end());
    for(double v : f2) {
        CHECK(v >= *lo - 1e-12);
        CHECK(v <= *hi + 1e-12);
    }
    for(std::size_t b = 0; b < g2.size(); b++)
        CHECK(f2[N.boundary_nodes()[b]] == g2[b]);
}

TEST_CASE("linearity and positivity on every domain")
{
    const DomainN domains[] = {DomainN::interval(9), DomainN::disc(linspace(0.2, 0.8, 4), 64),
        DomainN::rectangle(linspace(0, 1, 9), linspace(0, 1, 7))};
    for(const auto& N : domains) {
        const std::size_t nb = N.boundary_nodes().size();
        std::vector<double> g1(nb), g2(nb), mix(nb);
        for(std::size_t b = 0; b < nb; b++) {
            g1[b] = std::cos(1.7 * b) + 1.01;  // nonnegative
            g2[b] = std::sin(0.3 * b * b);
            mix[b] = 2 * g1[b] - 3 * g2[b];
        }
        const auto f1 = harmonic_extend(N, g1), f2 = harmonic_extend(N, g2), fm = harmonic_extend(N, mix);
        for(std::size_t i = 0; i < N.size(); i++) {
            CHECK(std::fabs(fm[i] - (2 * f1[i] - 3 * f2[i])) < 1e-10);
            CHECK(f1[i] >= 0);
        }
    }
}

TEST_CASE("convexity in an auxiliary variable is transferred to the extension")
{
    const auto N = DomainN::disc(linspace(0.1, 0.9, 5), 64);
    const auto x = linspace(0.05, 0.95, 19);
    const TensorGrid xg({x});
    // boundary family g_q(x) convex in x for every q, with q-dependent curvature
    std::vector<HarmonicField> ext;
    for(double xv : x) {
        std::vector<double> g;
        for(std::size_t j = 0; j < N.angle_count(); j++) {
            const double th = N.angle(j);
            g.push_back((1.2 + std::cos(3 * th)) * xv * xv + std::sin(th) * xv + (1 + std::cos(th)) * xv * std::log(xv));
        }
        ext.push_back(harmonic_extend(N, g));
    }
    for(std::size_t i = 0; i < N.size(); i++) {
        std::vector<double> slice;
        for(std::size_t a = 0; a < x.size(); a++)
            slice.push_back(ext[a][i]);
        for(std::size_t a = 1; a + 1 < x.size(); a++)
            CHECK(fd_hessian(xg, slice, a)(0, 0) > 0);
    }
}

TEST_CASE("extension weights")
{
    const auto N = DomainN::disc(linspace(0.1, 0.9, 3), 64);
    Vec p(2);
    p << 0.3, -0.2;
    const auto w = extension_weights(N, p);
    double s = 0;
    for(double v : w) {
        CHECK(v > 0);
        s += v;
    }
    CHECK(s == doctest::Approx(1.0));
    p << std::cos(N.angle(5)), std::sin(N.angle(5));
    const auto wb = extension_weights(N, p);
    CHECK(wb[5] == 1.0);
    CHECK_THROWS(extension_weights(DomainN::rectangle(linspace(0, 1, 4), linspace(0, 1, 4)), p));
    CHECK_THROWS_AS(DomainN::disc({0.5}, 63), std::invalid_argument);
}

TEST_CASE("kernel tables reproduce harmonic_extend")
{
    const DomainN domains[] = {DomainN::interval(7), DomainN::disc(linspace(0.2, 0.8, 4), 64),
        DomainN::rectangle(linspace(0, 1, 6), {0.0, 0.3, 0.5, 1.0})};
    for(const auto& N : domains) {
        const auto W = kernel_table(N);
        std::vector<double> g;
        for(std::size_t b = 0; b < N.boundary_nodes().size(); b++)
            g.push_back(std::cos(0.7 * b));
        const auto f = harmonic_extend(N, g);
        for(std::size_t i = 0; i < N.size(); i++) {
            double s = 0, wsum = 0;
            for(std::size_t q = 0; q < g.size(); q++) {
                s += W[i][q] * g[q];
                wsum += W[i][q];
                CHECK(W[i][q] >= -1e-14);
            }
            CHECK(s == doctest::Approx(f[i]).epsilon(1e-10).scale(1));
            CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}
