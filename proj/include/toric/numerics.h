#pragma once
/// Small numerical toolbox shared by all modules: fixed-capacity vectors,
/// function jets, log-sum-exp, Gauss-Legendre rules, cubic splines and
/// finite-difference helpers.

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace toric {

/// maximum supported dimension of the torus (and of the parameter domain)
constexpr int MAX_DIM = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, MAX_DIM, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, MAX_DIM, MAX_DIM>;

/// Value, gradient and Hessian of a scalar function at one point.
struct Jet {
    double value = 0;
    Vec grad;
    Mat hess;

    static Jet zero(int dim) {
        return Jet{0.0, Vec::Zero(dim), Mat::Zero(dim, dim)};
    }
    Jet& operator+=(const Jet& other) {
        value += other.value;
        grad += other.grad;
        hess += other.hess;
        return *this;
    }
    Jet& operator*=(double c) {
        value *= c;
        grad *= c;
        hess *= c;
        return *this;
    }
};

/// Raised when an iterative numerical procedure fails; the message carries
/// the location (node, parameter) where it happened.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::span<const double> as_span(const Vec& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}
Vec to_vec(std::span<const double> x);

/// log(sum_i exp(a_i)), stable for large |a_i|; -inf for an empty input
double log_sum_exp(std::span<const double> terms);

/// Streaming log-sum-exp accumulator (one rescaling per new maximum).
class LogSumExp {
public:
    void add(double term);
    double result() const;
private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0;
};

/// Gauss-Legendre nodes and weights on [-1,1].
struct GaussRule {
    std::vector<double> nodes, weights;
};
GaussRule gauss_legendre(int order);

/// Composite Gauss-Legendre rule on [a,b] split at the given (sorted, inside)
/// breakpoints and further into `panels` equal panels per piece.
GaussRule composite_rule(double a, double b, int panels, int order,
    std::span<const double> breakpoints = {});

/// Interpolating cubic spline with not-a-knot end conditions on a strictly
/// increasing, possibly non-uniform grid. Outside the grid the end cubic is
/// extrapolated.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    /// value, first and second derivative
    void eval(double x, double& val, double& der, double& der2) const;

    const std::vector<double>& xvalues() const { return x_; }
    const std::vector<double>& yvalues() const { return y_; }
    bool empty() const { return x_.empty(); }
private:
    std::vector<double> x_, y_, m_;  // m_ = second derivatives at nodes
    std::size_t segment(double x) const;
};

/// C1 bicubic Hermite interpolant on a tensor grid; the nodal first and
/// mixed derivatives come from cubic splines along each axis.
class BicubicSurface {
public:
    BicubicSurface() = default;
    /// values are row-major: values[i*ny + j] at (x[i], y[j])
    BicubicSurface(std::vector<double> x, std::vector<double> y, std::vector<double> values);
    Jet jet(double px, double py) const;
private:
    std::vector<double> x_, y_, f_, fx_, fy_, fxy_;
};

/// Strictly increasing check; throws std::invalid_argument with the name.
void require_increasing(std::span<const double> v, const std::string& what);

std::vector<double> linspace(double a, double b, std::size_t n);

/// Second-order finite differences on a non-uniform 3-point stencil
/// (xm, x0, xp) with values (fm, f0, fp).
double fd_first(double hm, double hp, double fm, double f0, double fp);
double fd_second(double hm, double hp, double fm, double f0, double fp);

/// Ordinary least squares fit y = a + b x; returns {a, b, r2}.
struct LineFit { double intercept, slope, r2; };
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace toric
