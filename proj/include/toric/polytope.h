#pragma once
/// Delzant polytopes P = { x : l_r(x) >= 0 for all facets r } with inward
/// primitive normals, l_r(x) = <x, v_r> + c_r, and their dilated lattice
/// point sets kP ∩ Z^m.

#include "toric/numerics.h"

#include "json.hpp"
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace toric {

/// Reduced fraction with positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    /// parses "p", "p/q" or a JSON integer
    static Rational parse(const nlohmann::json& j);
    bool operator==(const Rational&) const = default;
};

struct Facet {
    std::vector<std::int64_t> normal;  ///< primitive, inward-pointing
    Rational offset;

    double value(std::span<const double> x) const;
};

using LatticePoint = std::vector<std::int64_t>;

class DelzantPolytope {
public:
    /// Validates primitivity, boundedness, nonempty interior and the Delzant
    /// condition; throws std::invalid_argument otherwise.
    explicit DelzantPolytope(std::vector<Facet> facets);

    /// "interval" = [0,1], "simplex2" = standard 2-simplex, "square" = [0,1]^2
    static DelzantPolytope preset(std::string_view name);
    /// {"dim": m, "facets": [{"normal": [...], "offset": q}, ...]}
    static DelzantPolytope from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    int dim() const { return dim_; }
    std::size_t num_facets() const { return facets_.size(); }
    const Facet& facet(std::size_t r) const { return facets_.at(r); }
    const std::vector<Facet>& facets() const { return facets_; }

    double facet_value(std::size_t r, std::span<const double> x) const;
    double facet_value(std::size_t r, const Vec& x) const { return facet_value(r, as_span(x)); }
    /// min_r l_r(x); positive iff x is interior
    double min_facet_value(std::span<const double> x) const;
    bool contains(std::span<const double> x, double tol = 0) const;

    /// exact test l_r(alpha/k) >= 0 for all r
    bool contains_dilated(std::span<const std::int64_t> alpha, std::int64_t k) const;

    const std::vector<Vec>& vertices() const { return vertices_; }
    /// facet indices active at vertices()[i]
    const std::vector<std::vector<std::size_t>>& vertex_facets() const { return vertex_facets_; }
    Vec lower_corner() const { return lower_; }
    Vec upper_corner() const { return upper_; }
    /// Euclidean volume (dx measure)
    double volume() const;
    /// barycenter of the vertices, an interior point
    Vec center() const;

private:
    int dim_ = 0;
    std::vector<Facet> facets_;
    std::vector<Vec> vertices_;
    std::vector<std::vector<std::size_t>> vertex_facets_;
    Vec lower_, upper_;
};

struct LatticeSet {
    int level = 0;
    std::vector<LatticePoint> points;

    std::size_t size() const { return points.size(); }
    /// index of alpha in points, or npos
    std::size_t find(std::span<const std::int64_t> alpha) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Integer points of kP by bounding-box scan with exact membership tests.
LatticeSet lattice_points(const DelzantPolytope& P, int k);

struct NearFacets {
    std::vector<std::size_t> indices;
    std::size_t count = 0;
};

/// {r : l_r(x) < delta}; rejects x outside P by more than tol.
NearFacets near_facets(const DelzantPolytope& P, std::span<const double> x, double delta,
    double tol = 1e-12);

/// determinant of an integer square matrix (Bareiss, exact)
std::int64_t integer_determinant(std::vector<std::vector<std::int64_t>> a);

}  // namespace toric
