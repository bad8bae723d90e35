#pragma once
/// Reference values computed independently of the library: closed forms,
/// direct maximisation and Boost quadrature.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// sup_r (x r - phi(r)) by golden-section search on [lo, hi]
inline double conjugate_by_maximisation(const std::function<double(double)>& phi, double x, double lo, double hi)
{
    const double g = (std::sqrt(5.0) - 1) / 2;
    auto F = [&](double r) { return x * r - phi(r); };
    double a = lo, b = hi, c = b - g * (b - a), d = a + g * (b - a);
    double fc = F(c), fd = F(d);
    while(b - a > 1e-11) {
        if(fc > fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a); fc = F(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a); fd = F(d);
        }
    }
    return F(0.5 * (a + b));
}

/// Fubini-Study norming constant on CP^1 as the orbit integral
/// int_0^inf t^alpha (1+t)^{-k-2} dt in t = |z|^2 (torus volume dropped)
inline double fs_norming_by_quadrature(int k, int alpha)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double t) {
        if(t == 0)
            return alpha == 0 ? 1.0 : 0.0;
        return std::exp(alpha * std::log(t) - (k + 2) * std::log1p(t));
    };
    return integrator.integrate(f, 1e-14);
}

/// the same constant in closed form, alpha! (k-alpha)! / (k+1)!
inline double fs_norming_closed_form(int k, int alpha)
{
    return std::exp(std::lgamma(alpha + 1.0) + std::lgamma(k - alpha + 1.0) - std::lgamma(k + 2.0));
}

}  // namespace oracle
