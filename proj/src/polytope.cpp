#include "toric/polytope.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace toric {

namespace {

/// relative tolerance for vertex feasibility in floating point
const double VERTEX_TOL = 1e-9;

std::int64_t gcd_of(std::span<const std::int64_t> v)
{
    std::int64_t g = 0;
    for(auto c : v)
        g = std::gcd(g, c);
    return g;
}

// all m-element subsets of {0..d-1}
void for_each_subset(std::size_t d, std::size_t m, auto&& fn)
{
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    if(m > d)
        return;
    while(true) {
        fn(idx);
        std::size_t i = m;
        while(i > 0 && idx[i - 1] == d - m + i - 1)
            i--;
        if(i == 0)
            return;
        idx[i - 1]++;
        for(std::size_t j = i; j < m; j++)
            idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d)
{
    if(d == 0)
        throw std::invalid_argument("Rational: zero denominator");
    if(d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = std::gcd(n, d);
    num = n / (g == 0 ? 1 : g);
    den = d / (g == 0 ? 1 : g);
}

Rational Rational::parse(const nlohmann::json& j)
{
    if(j.is_number_integer())
        return Rational(j.get<std::int64_t>());
    if(j.is_string()) {
        const std::string s = j.get<std::string>();
        const auto slash = s.find('/');
        try {
            if(slash == std::string::npos)
                return Rational(std::stoll(s));
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch(const std::logic_error&) {
            throw std::invalid_argument("Rational: cannot parse '" + s + "'");
        }
    }
    throw std::invalid_argument("Rational: offset must be an integer or a \"p/q\" string");
}

double Facet::value(std::span<const double> x) const
{
    double s = offset.value();
    for(std::size_t i = 0; i < normal.size(); i++)
        s += static_cast<double>(normal[i]) * x[i];
    return s;
}

std::int64_t integer_determinant(std::vector<std::vector<std::int64_t>> a)
{
    const std::size_t n = a.size();
    if(n == 0)
        return 1;
    std::int64_t sign = 1, prev = 1;
    for(std::size_t k = 0; k + 1 < n; k++) {
        if(a[k][k] == 0) {
            std::size_t p = k + 1;
            while(p < n && a[p][k] == 0)
                p++;
            if(p == n)
                return 0;
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for(std::size_t i = k + 1; i < n; i++)
            for(std::size_t j = k + 1; j < n; j++)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

DelzantPolytope::DelzantPolytope(std::vector<Facet> facets) : facets_(std::move(facets))
{
    if(facets_.empty())
        throw std::invalid_argument("DelzantPolytope: no facets");
    dim_ = static_cast<int>(facets_.front().normal.size());
    if(dim_ < 1 || dim_ > MAX_DIM)
        throw std::invalid_argument("DelzantPolytope: unsupported dimension");
    for(const auto& f : facets_) {
        if(static_cast<int>(f.normal.size()) != dim_)
            throw std::invalid_argument("DelzantPolytope: facet normals of mixed dimension");
        if(gcd_of(f.normal) != 1)
            throw std::invalid_argument("DelzantPolytope: facet normal is not primitive");
    }

    // vertices: feasible solutions of m active facet equations
    const auto m = static_cast<std::size_t>(dim_);
    for_each_subset(facets_.size(), m, [&](const std::vector<std::size_t>& idx) {
        Eigen::MatrixXd A(dim_, dim_);
        Eigen::VectorXd b(dim_);
        for(int i = 0; i < dim_; i++) {
            for(int j = 0; j < dim_; j++)
                A(i, j) = static_cast<double>(facets_[idx[i]].normal[j]);
            b[i] = -facets_[idx[i]].offset.value();
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if(!lu.isInvertible())
            return;
        Eigen::VectorXd x = lu.solve(b);
        Vec v = x;
        double scale = 1 + v.cwiseAbs().maxCoeff();
        for(const auto& f : facets_)
            if(f.value(as_span(v)) < -VERTEX_TOL * scale)
                return;
        for(const auto& w : vertices_)
            if((w - v).norm() < VERTEX_TOL * scale)
                return;
        vertices_.push_back(v);
    });
    if(vertices_.size() < m + 1)
        throw std::invalid_argument("DelzantPolytope: polytope is unbounded or has empty interior");

    lower_ = upper_ = vertices_.front();
    for(const auto& v : vertices_) {
        lower_ = lower_.cwiseMin(v);
        upper_ = upper_.cwiseMax(v);
    }
    const Vec c = center();
    if(min_facet_value(as_span(c)) <= 0)
        throw std::invalid_argument("DelzantPolytope: empty interior");
    // boundedness: the recession cone {d : <d, v_r> >= 0} must be trivial;
    // its extreme rays are cut out by m-1 independent normals
    auto is_recession = [&](const Eigen::VectorXd& d) {
        for(const auto& f : facets_) {
            double s = 0;
            for(int i = 0; i < dim_; i++)
                s += static_cast<double>(f.normal[i]) * d[i];
            if(s < -VERTEX_TOL)
                return false;
        }
        return true;
    };
    auto check_ray = [&](const Eigen::VectorXd& d) {
        if(is_recession(d) || is_recession(-d))
            throw std::invalid_argument("DelzantPolytope: polytope is unbounded");
    };
    if(dim_ == 1) {
        check_ray(Eigen::VectorXd::Ones(1));
    } else {
        for_each_subset(facets_.size(), m - 1, [&](const std::vector<std::size_t>& idx) {
            Eigen::MatrixXd A(dim_ - 1, dim_);
            for(int i = 0; i + 1 < dim_; i++)
                for(int j = 0; j < dim_; j++)
                    A(i, j) = static_cast<double>(facets_[idx[i]].normal[j]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
            if(lu.rank() != dim_ - 1)
                return;
            Eigen::VectorXd d = lu.kernel().col(0);
            check_ray(d / d.norm());
        });
    }

    // Delzant condition at each vertex
    for(const auto& v : vertices_) {
        const double scale = 1 + v.cwiseAbs().maxCoeff();
        std::vector<std::size_t> active;
        for(std::size_t r = 0; r < facets_.size(); r++)
            if(std::fabs(facets_[r].value(as_span(v))) < VERTEX_TOL * scale)
                active.push_back(r);
        if(active.size() != m) {
            std::ostringstream os;
            os << "DelzantPolytope: vertex is not simple (" << active.size() << " facets meet)";
            throw std::invalid_argument(os.str());
        }
        std::vector<std::vector<std::int64_t>> mat;
        for(auto r : active)
            mat.push_back(facets_[r].normal);
        const auto det = integer_determinant(mat);
        if(det != 1 && det != -1)
            throw std::invalid_argument("DelzantPolytope: normals at a vertex are not a Z-basis");
        vertex_facets_.push_back(active);
    }
}

DelzantPolytope DelzantPolytope::preset(std::string_view name)
{
    if(name == "interval")
        return DelzantPolytope({{{1}, 0}, {{-1}, 1}});
    if(name == "simplex2")
        return DelzantPolytope({{{1, 0}, 0}, {{0, 1}, 0}, {{-1, -1}, 1}});
    if(name == "square")
        return DelzantPolytope({{{1, 0}, 0}, {{-1, 0}, 1}, {{0, 1}, 0}, {{0, -1}, 1}});
    throw std::invalid_argument("unknown polytope preset '" + std::string(name) + "'");
}

DelzantPolytope DelzantPolytope::from_json(const nlohmann::json& j)
{
    if(j.is_string())
        return preset(j.get<std::string>());
    if(j.contains("preset"))
        return preset(j.at("preset").get<std::string>());
    const int m = j.at("dim").get<int>();
    std::vector<Facet> facets;
    for(const auto& f : j.at("facets")) {
        Facet facet;
        facet.normal = f.at("normal").get<std::vector<std::int64_t>>();
        facet.offset = Rational::parse(f.at("offset"));
        if(static_cast<int>(facet.normal.size()) != m)
            throw std::invalid_argument("polytope JSON: normal length differs from dim");
        facets.push_back(std::move(facet));
    }
    return DelzantPolytope(std::move(facets));
}

nlohmann::json DelzantPolytope::to_json() const
{
    nlohmann::json j;
    j["dim"] = dim_;
    j["facets"] = nlohmann::json::array();
    for(const auto& f : facets_) {
        nlohmann::json off = f.offset.den == 1 ? nlohmann::json(f.offset.num)
            : nlohmann::json(std::to_string(f.offset.num) + "/" + std::to_string(f.offset.den));
        j["facets"].push_back({{"normal", f.normal}, {"offset", off}});
    }
    return j;
}

double DelzantPolytope::facet_value(std::size_t r, std::span<const double> x) const
{
    if(x.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("facet_value: point dimension mismatch");
    return facets_.at(r).value(x);
}

double DelzantPolytope::min_facet_value(std::span<const double> x) const
{
    double m = std::numeric_limits<double>::infinity();
    for(const auto& f : facets_)
        m = std::min(m, f.value(x));
    return m;
}

bool DelzantPolytope::contains(std::span<const double> x, double tol) const
{
    return min_facet_value(x) >= -tol;
}

bool DelzantPolytope::contains_dilated(std::span<const std::int64_t> alpha, std::int64_t k) const
{
    for(const auto& f : facets_) {
        // <alpha, v> * den + k * num >= 0  <=>  l_r(alpha/k) >= 0
        __int128 s = 0;
        for(std::size_t i = 0; i < alpha.size(); i++)
            s += static_cast<__int128>(alpha[i]) * f.normal[i];
        s = s * f.offset.den + static_cast<__int128>(k) * f.offset.num;
        if(s < 0)
            return false;
    }
    return true;
}

Vec DelzantPolytope::center() const
{
    Vec c = Vec::Zero(dim_);
    for(const auto& v : vertices_)
        c += v;
    return c / static_cast<double>(vertices_.size());
}

double DelzantPolytope::volume() const
{
    if(dim_ == 1)
        return upper_[0] - lower_[0];
    if(dim_ == 2) {
        // vertices sorted by angle around the center; shoelace formula
        const Vec c = center();
        std::vector<Vec> vs = vertices_;
        std::sort(vs.begin(), vs.end(), [&](const Vec& a, const Vec& b) {
            return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
        });
        double area = 0;
        for(std::size_t i = 0; i < vs.size(); i++) {
            const Vec& p = vs[i];
            const Vec& q = vs[(i + 1) % vs.size()];
            area += p[0] * q[1] - q[0] * p[1];
        }
        return 0.5 * std::fabs(area);
    }
    throw std::invalid_argument("DelzantPolytope::volume: only dimensions 1 and 2");
}

std::size_t LatticeSet::find(std::span<const std::int64_t> alpha) const
{
    for(std::size_t i = 0; i < points.size(); i++)
        if(std::equal(points[i].begin(), points[i].end(), alpha.begin(), alpha.end()))
            return i;
    return npos;
}

LatticeSet lattice_points(const DelzantPolytope& P, int k)
{
    if(k <= 0)
        throw std::invalid_argument("lattice_points: level must be positive");
    const int m = P.dim();
    std::vector<std::int64_t> lo(m), hi(m);
    for(int i = 0; i < m; i++) {
        lo[i] = static_cast<std::int64_t>(std::floor(k * P.lower_corner()[i])) - 1;
        hi[i] = static_cast<std::int64_t>(std::ceil(k * P.upper_corner()[i])) + 1;
    }
    LatticeSet out;
    out.level = k;
    LatticePoint alpha(lo);
    while(true) {
        if(P.contains_dilated(alpha, k))
            out.points.push_back(alpha);
        // odometer increment, last axis fastest
        int i = m - 1;
        while(i >= 0 && alpha[i] == hi[i]) {
            alpha[i] = lo[i];
            i--;
        }
        if(i < 0)
            break;
        alpha[i]++;
    }
    return out;
}

NearFacets near_facets(const DelzantPolytope& P, std::span<const double> x, double delta, double tol)
{
    if(!(delta > 0))
        throw std::invalid_argument("near_facets: delta must be positive");
    if(!P.contains(x, tol))
        throw std::invalid_argument("near_facets: point lies outside the polytope");
    NearFacets out;
    for(std::size_t r = 0; r < P.num_facets(); r++)
        if(P.facet_value(r, x) < delta)
            out.indices.push_back(r);
    out.count = out.indices.size();
    return out;
}

}  // namespace toric
