#include "toric/bergman.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace toric {

namespace {

std::string format_alpha(std::span<const std::int64_t> alpha)
{
    std::string s = "(";
    for(std::size_t i = 0; i < alpha.size(); i++)
        s += (i ? "," : "") + std::to_string(alpha[i]);
    return s + ")";
}

Vec alpha_vec(std::span<const std::int64_t> alpha)
{
    Vec v(static_cast<Eigen::Index>(alpha.size()));
    for(std::size_t i = 0; i < alpha.size(); i++)
        v[i] = static_cast<double>(alpha[i]);
    return v;
}

/// Quadrature nodes over P with their weights folded in as log w.
struct PolytopeRule {
    std::vector<Vec> nodes;
    std::vector<double> log_weights;
};

/// panels for a piece of an axis so that the whole axis gets about `total`
int piece_panels(double piece, double whole, int total)
{
    return std::max(1, static_cast<int>(std::ceil(total * piece / whole - 1e-9)));
}

GaussRule axis_rule(double a, double b, double whole, int panels, int order, std::span<const double> cuts)
{
    std::vector<double> pts{a};
    for(double c : cuts)
        if(c > a + 1e-14 && c < b - 1e-14)
            pts.push_back(c);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    GaussRule out;
    for(std::size_t i = 0; i + 1 < pts.size(); i++) {
        const GaussRule g = composite_rule(pts[i], pts[i + 1], piece_panels(pts[i + 1] - pts[i], whole, panels), order);
        out.nodes.insert(out.nodes.end(), g.nodes.begin(), g.nodes.end());
        out.weights.insert(out.weights.end(), g.weights.begin(), g.weights.end());
    }
    return out;
}

PolytopeRule polytope_rule(const DelzantPolytope& P, int panels, int order)
{
    PolytopeRule rule;
    const int m = P.dim();
    const double lo0 = P.lower_corner()[0], hi0 = P.upper_corner()[0];
    std::vector<double> cuts0;
    for(const Vec& v : P.vertices())
        cuts0.push_back(v[0]);
    const GaussRule outer = axis_rule(lo0, hi0, hi0 - lo0, panels, order, cuts0);
    if(m == 1) {
        for(std::size_t i = 0; i < outer.nodes.size(); i++) {
            rule.nodes.push_back(Vec::Constant(1, outer.nodes[i]));
            rule.log_weights.push_back(std::log(outer.weights[i]));
        }
        return rule;
    }
    if(m != 2)
        throw std::invalid_argument("norming_constants: only dimensions 1 and 2 are supported");
    const double whole1 = P.upper_corner()[1] - P.lower_corner()[1];
    for(std::size_t i = 0; i < outer.nodes.size(); i++) {
        const double x0 = outer.nodes[i];
        // slice {x1 : l_r(x0, x1) >= 0}
        double a = P.lower_corner()[1], b = P.upper_corner()[1];
        for(const Facet& f : P.facets()) {
            const double n0 = static_cast<double>(f.normal[0]), n1 = static_cast<double>(f.normal[1]);
            if(n1 == 0)
                continue;
            const double bound = -(f.offset.value() + n0 * x0) / n1;
            if(n1 > 0)
                a = std::max(a, bound);
            else
                b = std::min(b, bound);
        }
        if(!(b > a))
            continue;
        const GaussRule inner = axis_rule(a, b, whole1, panels, order, {});
        for(std::size_t j = 0; j < inner.nodes.size(); j++) {
            Vec x(2);
            x << x0, inner.nodes[j];
            rule.nodes.push_back(x);
            rule.log_weights.push_back(std::log(outer.weights[i] * inner.weights[j]));
        }
    }
    return rule;
}

std::vector<double> integrate_log_q(const SymplecticPotential& u, int k, const LatticeSet& L, int panels, int order)
{
    const PolytopeRule rule = polytope_rule(u.polytope(), panels, order);
    const std::size_t n = rule.nodes.size();
    // exponent at node i: base_i + <alpha, grad u(x_i)>
    std::vector<double> base(n);
    std::vector<Vec> grad(n);
    for(std::size_t i = 0; i < n; i++) {
        const Jet j = u.jet(rule.nodes[i]);
        base[i] = k * (j.value - rule.nodes[i].dot(j.grad)) + rule.log_weights[i];
        grad[i] = j.grad;
    }
    std::vector<double> out(L.size());
    std::vector<double> e(n);
    for(std::size_t a = 0; a < L.size(); a++) {
        const Vec alpha = alpha_vec(L.points[a]);
        for(std::size_t i = 0; i < n; i++)
            e[i] = base[i] + alpha.dot(grad[i]);
        out[a] = log_sum_exp(e);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- tables

double NormingTable::at(std::span<const std::int64_t> alpha) const
{
    const std::size_t i = lattice.find(alpha);
    if(i == LatticeSet::npos)
        throw std::out_of_range("NormingTable: lattice point " + format_alpha(alpha) + " not in the table");
    return log_q[i];
}

NormingTable NormingTable::shifted(double c) const
{
    NormingTable t = *this;
    for(double& v : t.log_q)
        v += c;
    return t;
}

void NormingTable::write_csv(std::ostream& os) const
{
    const auto old = os.precision(17);
    os << "k,alpha,log_q\n";
    for(std::size_t i = 0; i < size(); i++) {
        const auto& a = lattice.points[i];
        os << level << ',';
        if(a.size() > 1)
            os << '"';
        for(std::size_t j = 0; j < a.size(); j++)
            os << (j ? "," : "") << a[j];
        if(a.size() > 1)
            os << '"';
        os << ',' << log_q[i] << '\n';
    }
    os.precision(old);
}

NormingTable NormingTable::read_csv(std::istream& is)
{
    std::string line;
    if(!std::getline(is, line) || line != "k,alpha,log_q")
        throw std::invalid_argument("NormingTable::read_csv: missing header");
    NormingTable t;
    t.provenance = "csv";
    while(std::getline(is, line)) {
        if(line.empty())
            continue;
        const std::size_t c1 = line.find(',');
        std::string rest = line.substr(c1 + 1);
        std::string alpha_text;
        if(!rest.empty() && rest.front() == '"') {
            const std::size_t q = rest.find('"', 1);
            if(q == std::string::npos)
                throw std::invalid_argument("NormingTable::read_csv: unterminated quote");
            alpha_text = rest.substr(1, q - 1);
            rest = rest.substr(q + 1);
        } else {
            const std::size_t c = rest.find(',');
            alpha_text = rest.substr(0, c);
            rest = rest.substr(c);
        }
        if(c1 == std::string::npos || rest.empty() || rest.front() != ',')
            throw std::invalid_argument("NormingTable::read_csv: malformed row '" + line + "'");
        const int k = std::stoi(line.substr(0, c1));
        if(t.lattice.size() && k != t.level)
            throw std::invalid_argument("NormingTable::read_csv: mixed levels");
        t.level = t.lattice.level = k;
        LatticePoint a;
        std::stringstream as(alpha_text);
        std::string tok;
        while(std::getline(as, tok, ','))
            a.push_back(std::stoll(tok));
        t.lattice.points.push_back(std::move(a));
        t.log_q.push_back(std::stod(rest.substr(1)));
    }
    return t;
}

NormingTable norming_constants(const SymplecticPotential& u, int k, const QuadratureOptions& opt)
{
    if(k < 1)
        throw std::invalid_argument("norming_constants: level must be positive");
    if(u.singular_scale() <= 0)
        throw std::invalid_argument("norming_constants: potential needs the Guillemin singular part");
    NormingTable t;
    t.level = k;
    t.lattice = lattice_points(u.polytope(), k);
    const int panels = opt.panels_per_level * k;
    t.log_q = integrate_log_q(u, k, t.lattice, panels, opt.order);
    if(opt.validate) {
        const auto fine = integrate_log_q(u, k, t.lattice, 2 * panels, opt.order);
        std::string bad;
        for(std::size_t a = 0; a < t.size(); a++) {
            if(!std::isfinite(t.log_q[a]) || std::fabs(fine[a] - t.log_q[a]) > opt.tolerance)
                bad += " " + format_alpha(t.lattice.points[a]);
        }
        if(!bad.empty())
            throw NumericalError("norming_constants: panel doubling disagrees at level " + std::to_string(k)
                + " for alpha" + bad);
    }
    std::ostringstream prov;
    prov << "gauss-legendre order " << opt.order << ", " << panels << " panels per axis";
    t.provenance = prov.str();
    return t;
}

// ---------------------------------------------------------------- monomials

double log_normalized_monomial(const NormingTable& table, const KahlerPotential& phi,
    std::span<const std::int64_t> alpha, const Vec& rho)
{
    return alpha_vec(alpha).dot(rho) - table.level * phi.value(rho) - table.at(alpha);
}

double normalized_monomial(const NormingTable& table, const KahlerPotential& phi,
    std::span<const std::int64_t> alpha, const Vec& rho)
{
    return std::exp(log_normalized_monomial(table, phi, alpha, rho));
}

namespace {

Vec interior_point(const NormingTable& table, const SymplecticPotential& u, std::span<const std::int64_t> alpha)
{
    const Vec x = alpha_vec(alpha) / static_cast<double>(table.level);
    if(!(u.polytope().min_facet_value(as_span(x)) > 0))
        throw std::invalid_argument("peak value: alpha/k = " + format_alpha(alpha) + "/k lies on the boundary of P");
    return x;
}

}  // namespace

double peak_value(const NormingTable& table, const SymplecticPotential& u, std::span<const std::int64_t> alpha)
{
    return peak_value(table, u, legendre_dual(u), alpha);
}

double peak_value(const NormingTable& table, const SymplecticPotential& u, const KahlerPotential& phi,
    std::span<const std::int64_t> alpha)
{
    const Vec x = interior_point(table, u, alpha);
    const Vec rho = u.jet(x).grad;
    if(!phi.in_domain(rho))
        throw std::invalid_argument("peak value: grad u(alpha/k) leaves the potential's grid");
    return normalized_monomial(table, phi, alpha, rho);
}

double log_peak_by_duality(const NormingTable& table, const SymplecticPotential& u,
    std::span<const std::int64_t> alpha)
{
    const Vec x = interior_point(table, u, alpha);
    return table.level * u.value(x) - table.at(alpha);
}

double bargmann_fock_peak(int k, int alpha)
{
    if(k < 1 || alpha < 0)
        throw std::invalid_argument("bargmann_fock_peak: need k >= 1 and alpha >= 0");
    const double a = alpha;
    const double log_pow = alpha == 0 ? 0.0 : a * std::log(a);
    return std::exp(std::log(static_cast<double>(k)) - a + log_pow - std::lgamma(a + 1));
}

double szego_sum(const NormingTable& table, const KahlerPotential& phi, const Vec& rho)
{
    const double k = table.level;
    const double kphi = k * phi.value(rho);
    LogSumExp acc;
    for(std::size_t a = 0; a < table.size(); a++)
        acc.add(alpha_vec(table.lattice.points[a]).dot(rho) - kphi - table.log_q[a]);
    return std::exp(acc.result() - rho.size() * std::log(k));
}

double localization_gap(const NormingTable& table, const KahlerPotential& phi, const Vec& rho, double delta)
{
    if(!(delta > 0 && delta < 0.5))
        throw std::invalid_argument("localization_gap: delta must lie in (0, 1/2)");
    const double k = table.level;
    const Jet j = phi.jet(rho);
    const double radius = std::pow(k, delta - 0.5);
    LogSumExp acc;
    for(std::size_t a = 0; a < table.size(); a++) {
        const Vec alpha = alpha_vec(table.lattice.points[a]);
        if((alpha / k - j.grad).norm() <= radius)
            continue;
        acc.add(alpha.dot(rho) - k * j.value - table.log_q[a]);
    }
    return std::exp(acc.result() - rho.size() * std::log(k));
}

PeakAsymptotics peak_asymptotics_check(const NormingTable& table, const SymplecticPotential& u,
    const std::vector<LatticePoint>& alphas)
{
    if(alphas.empty())
        throw std::invalid_argument("peak_asymptotics_check: no lattice points given");
    const double k = table.level;
    const double delta_k = 1 / (std::sqrt(k) * std::log(k));
    const int m = u.dim();
    PeakAsymptotics out;
    for(const auto& alpha : alphas) {
        const Vec x = alpha_vec(alpha) / k;
        if(near_facets(u.polytope(), as_span(x), delta_k).count != 0)
            throw std::invalid_argument("peak_asymptotics_check: alpha = " + format_alpha(alpha)
                + " is within 1/(sqrt(k) log k) of a facet");
        const double logp = log_peak_by_duality(table, u, alpha);
        const double logdet = std::log(u.jet(x).hess.determinant());
        out.constants.push_back(std::exp(logp - 0.5 * m * std::log(k) - 0.5 * logdet));
    }
    const auto [lo, hi] = std::minmax_element(out.constants.begin(), out.constants.end());
    double s = 0;
    for(double c : out.constants)
        s += c;
    out.mean = s / static_cast<double>(out.constants.size());
    out.dispersion = (*hi - *lo) / out.mean;
    return out;
}

// ---------------------------------------------------------------- harmonic norming

HarmonicNorming harmonic_norming(const DomainN& N, const std::vector<NormingTable>& boundary_tables)
{
    const auto& bnd = N.boundary_nodes();
    if(boundary_tables.size() != bnd.size())
        throw std::invalid_argument("harmonic_norming: one table per boundary node is required");
    const NormingTable& first = boundary_tables.front();
    for(const auto& t : boundary_tables)
        if(t.level != first.level || t.lattice.points != first.lattice.points)
            throw std::invalid_argument("harmonic_norming: boundary tables have different lattice sets");
    HarmonicNorming H;
    H.level = first.level;
    H.lattice = first.lattice;
    std::optional<RectangleExtender> rect;
    if(N.kind() == DomainKind::Rectangle)
        rect.emplace(N);
    std::vector<double> g(bnd.size());
    for(std::size_t a = 0; a < first.size(); a++) {
        for(std::size_t q = 0; q < bnd.size(); q++)
            g[q] = boundary_tables[q].log_q[a];
        H.lambda.push_back(rect ? rect->extend(g) : harmonic_extend(N, g));
    }
    return H;
}

double bergman_potential(const LatticeSet& lattice, std::span<const double> lambda, const Vec& rho)
{
    LogSumExp acc;
    for(std::size_t a = 0; a < lattice.size(); a++)
        acc.add(alpha_vec(lattice.points[a]).dot(rho) - lambda[a]);
    return acc.result() / lattice.level;
}

double bergman_potential(const HarmonicNorming& H, std::size_t node, const Vec& rho)
{
    std::vector<double> lambda(H.size());
    for(std::size_t a = 0; a < H.size(); a++)
        lambda[a] = H.lambda[a].at(node);
    return bergman_potential(H.lattice, lambda, rho);
}

// ---------------------------------------------------------------- ratios

double RatioReport::rk() const { return std::exp(log_rk); }
double RatioReport::rinf() const { return std::exp(log_rinf); }

RatioReport ratio_report(const DomainN& N, const HarmonicNorming& H, const NormingTable& table_at_y,
    const std::vector<SymplecticPotential>& boundary_u, const SymplecticPotential& u_y, std::size_t node,
    std::span<const std::int64_t> alpha)
{
    if(boundary_u.size() != N.boundary_nodes().size())
        throw std::invalid_argument("ratio_report: one boundary potential per boundary node is required");
    const std::size_t a = H.lattice.find(alpha);
    if(a == LatticeSet::npos)
        throw std::invalid_argument("ratio_report: alpha not in the lattice set");
    const Vec x = alpha_vec(alpha) / static_cast<double>(H.level);
    if(!(u_y.polytope().min_facet_value(as_span(x)) > 0))
        throw std::invalid_argument("ratio_report: alpha/k must be interior");
    RatioReport r;
    r.log_rk = table_at_y.at(alpha) - H.lambda[a].at(node);
    std::vector<double> log_delta(boundary_u.size());
    for(std::size_t q = 0; q < boundary_u.size(); q++)
        log_delta[q] = std::log(abreu_delta(boundary_u[q], x));
    double ext;
    if(N.is_boundary(node)) {
        const auto& bnd = N.boundary_nodes();
        ext = log_delta[std::find(bnd.begin(), bnd.end(), node) - bnd.begin()];
    } else if(N.kind() == DomainKind::Rectangle) {
        ext = harmonic_extend(N, log_delta)[node];
    } else {
        const auto w = extension_weights(N, N.node(node));
        ext = 0;
        for(std::size_t q = 0; q < w.size(); q++)
            ext += w[q] * log_delta[q];
    }
    r.log_rinf = 0.5 * (std::log(abreu_delta(u_y, x)) - ext);
    return r;
}

}  // namespace toric
