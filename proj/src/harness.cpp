#include "toric/harness.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <regex>
#include <sstream>

namespace toric {

namespace {

constexpr double NaN = std::numeric_limits<double>::quiet_NaN();

std::string location(const DomainN& N, std::size_t node)
{
    std::ostringstream os;
    os << "y node " << node << " (" << N.node(node).transpose() << ")";
    return os.str();
}

/// Hessian of every slice must be positive definite on a check grid.
void assert_convex(const SymplecticPotential& u, const DomainN& N, std::size_t node)
{
    const DelzantPolytope& P = u.polytope();
    const std::size_t n = P.dim() == 1 ? 41 : 21;
    const PolytopeGrid X = PolytopeGrid::uniform(P, n, 1e-3);
    for(std::size_t i = 0; i < X.size(); i++) {
        if(!X.valid(i))
            continue;
        const Vec x = X.grid().node(i);
        if(!is_positive_definite(u.jet(x).hess)) {
            std::ostringstream os;
            os << "solve_harmonic_map: slice at " << location(N, node) << " is not convex at x = ("
               << x.transpose() << ")";
            throw NumericalError(os.str());
        }
    }
}

double sup_abs(double current, double v)
{
    return std::max(current, std::fabs(v));
}

}  // namespace

// ---------------------------------------------------------------- config

std::pair<std::string, double> parse_family(const std::string& spec, double fallback)
{
    static const std::regex re(R"(^\s*([A-Za-z][\w-]*)\s*(?:\(\s*([^)]*?)\s*\))?\s*$)");
    std::smatch m;
    if(!std::regex_match(spec, m, re))
        throw std::invalid_argument("malformed family specification '" + spec + "'");
    double a = fallback;
    if(m[2].matched && !m[2].str().empty()) {
        std::size_t used = 0;
        try {
            a = std::stod(m[2].str(), &used);
        } catch(const std::exception&) {
            used = 0;
        }
        if(used != m[2].str().size())
            throw std::invalid_argument("malformed family parameter in '" + spec + "'");
    }
    return {m[1].str(), a};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j)
{
    ExperimentConfig c;
    c.name = j.value("name", c.name);
    if(j.contains("polytope"))
        c.polytope = j.at("polytope");
    c.domain = j.value("domain", c.domain);
    if(j.contains("resolution"))
        c.resolution = j.at("resolution").get<std::vector<std::size_t>>();
    else if(c.domain == "disc")
        c.resolution = {4, 128};
    else if(c.domain == "rectangle")
        c.resolution = {11, 11};
    c.disc_radius = j.value("disc_radius", c.disc_radius);
    if(j.contains("family"))
        c.family = j.at("family").get<std::string>();
    else if(c.domain == "disc")
        c.family = "loop(0.1)";
    else if(c.domain == "rectangle")
        c.family = "sheet(0.1)";
    c.boundary = j.value("boundary", c.boundary);
    c.levels = j.value("levels", c.levels);
    if(j.contains("rho")) {
        const auto& r = j.at("rho");
        c.rho_min = r.value("min", c.rho_min);
        c.rho_max = r.value("max", c.rho_max);
        c.rho_points = r.value("points", c.rho_points);
    }
    c.window = j.value("window", c.window);
    if(j.contains("quadrature")) {
        const auto& q = j.at("quadrature");
        c.quadrature.order = q.value("order", c.quadrature.order);
        c.quadrature.panels_per_level = q.value("panels_per_level", c.quadrature.panels_per_level);
        c.quadrature.validate = q.value("validate", c.quadrature.validate);
        c.quadrature.tolerance = q.value("tolerance", c.quadrature.tolerance);
    }
    c.output = j.value("output", c.output);
    c.validate();
    return c;
}

nlohmann::json ExperimentConfig::to_json() const
{
    nlohmann::json j;
    j["name"] = name;
    j["polytope"] = polytope;
    j["domain"] = domain;
    j["resolution"] = resolution;
    j["disc_radius"] = disc_radius;
    j["family"] = family;
    if(!boundary.empty())
        j["boundary"] = boundary;
    j["levels"] = levels;
    j["rho"] = {{"min", rho_min}, {"max", rho_max}, {"points", rho_points}};
    j["window"] = window;
    j["quadrature"] = {{"order", quadrature.order}, {"panels_per_level", quadrature.panels_per_level},
        {"validate", quadrature.validate}, {"tolerance", quadrature.tolerance}};
    j["output"] = output;
    return j;
}

void ExperimentConfig::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("ExperimentConfig: " + what); };
    if(levels.empty())
        fail("no levels");
    for(std::size_t i = 0; i < levels.size(); i++) {
        if(levels[i] < 2)
            fail("levels must be at least 2");
        if(i && levels[i] <= levels[i - 1])
            fail("levels must be strictly increasing");
    }
    if(!(window > 0 && window < 0.5))
        fail("window must lie in (0, 0.5)");
    if(window <= boundary_margin(levels.back()))
        fail("window must exceed the boundary margin 1/(4 k_max)");
    if(!(rho_min < rho_max) || rho_points < 5)
        fail("rho grid needs min < max and at least 5 points");
    if(domain == "interval") {
        if(resolution.size() != 1 || resolution[0] < 3)
            fail("interval resolution is [n] with n >= 3");
    } else if(domain == "disc") {
        if(resolution.size() != 2 || resolution[0] < 1 || resolution[1] < 64 || resolution[1] % 2)
            fail("disc resolution is [rings >= 1, even angles >= 64]");
        if(!(disc_radius > 0 && disc_radius < 1))
            fail("disc_radius must lie in (0, 1)");
    } else if(domain == "rectangle") {
        if(resolution.size() != 2 || resolution[0] < 3 || resolution[1] < 3)
            fail("rectangle resolution is [nx >= 3, ny >= 3]");
    } else {
        fail("unknown domain '" + domain + "'");
    }
    if(quadrature.order < 1 || quadrature.panels_per_level < 1)
        fail("quadrature order and panels must be positive");
    if(boundary.empty())
        parse_family(family);
}

DelzantPolytope ExperimentConfig::make_polytope() const
{
    return DelzantPolytope::from_json(polytope);
}

DomainN ExperimentConfig::make_domain() const
{
    if(domain == "interval")
        return DomainN::interval(resolution[0]);
    if(domain == "disc") {
        std::vector<double> radii;
        for(std::size_t i = 1; i <= resolution[0]; i++)
            radii.push_back(disc_radius * static_cast<double>(i) / static_cast<double>(resolution[0]));
        return DomainN::disc(radii, resolution[1]);
    }
    return DomainN::rectangle(linspace(0, 1, resolution[0]), linspace(0, 1, resolution[1]));
}

TensorGrid ExperimentConfig::make_rho_grid() const
{
    return TensorGrid::uniform(make_polytope().dim(), rho_min, rho_max, rho_points);
}

SymplecticPotential ExperimentConfig::loop_member(const DelzantPolytope& P, double theta) const
{
    const auto [kind, a] = parse_family(family);
    if(kind != "loop")
        throw std::invalid_argument("loop_member: family '" + family + "' is not a loop");
    return SymplecticPotential::guillemin(P).with_term(a * (1 + std::cos(theta)), facet_product(P));
}

std::vector<SymplecticPotential> ExperimentConfig::boundary_potentials(const DelzantPolytope& P,
    const DomainN& N) const
{
    const auto& bnd = N.boundary_nodes();
    std::vector<SymplecticPotential> out;
    if(!boundary.empty()) {
        if(boundary.size() != bnd.size())
            throw std::invalid_argument("ExperimentConfig: boundary list has " + std::to_string(boundary.size())
                + " entries for " + std::to_string(bnd.size()) + " boundary nodes");
        for(const auto& entry : boundary) {
            if(entry.rfind("file:", 0) == 0) {
                std::ifstream in(entry.substr(5));
                if(!in)
                    throw std::runtime_error("cannot open potential file '" + entry.substr(5) + "'");
                auto file = read_potential(in);
                if(!file.symplectic)
                    throw std::invalid_argument("potential file '" + entry.substr(5) + "' is not symplectic");
                out.push_back(*file.symplectic);
            } else {
                out.push_back(symplectic_preset(entry, P));
            }
        }
        return out;
    }
    const auto [kind, a] = parse_family(family);
    const auto basis = facet_product(P);
    const auto u0 = SymplecticPotential::guillemin(P);
    if(kind == "geodesic") {
        if(N.kind() != DomainKind::Interval)
            throw std::invalid_argument("family geodesic needs the interval domain");
        out = {u0, u0.with_term(a, basis)};
    } else if(kind == "loop") {
        if(N.kind() != DomainKind::Disc)
            throw std::invalid_argument("family loop needs the disc domain");
        for(std::size_t j = 0; j < bnd.size(); j++)
            out.push_back(u0.with_term(a * (1 + std::cos(N.angle(j))), basis));
    } else if(kind == "sheet") {
        if(N.kind() != DomainKind::Rectangle)
            throw std::invalid_argument("family sheet needs the rectangle domain");
        for(std::size_t b : bnd) {
            const Vec q = N.node(b);
            out.push_back(u0.with_term(a * (1 + q[0] * q[1]), basis));
        }
    } else {
        throw std::invalid_argument("unknown boundary family '" + kind + "'");
    }
    return out;
}

// ---------------------------------------------------------------- solver

HarmonicMap solve_harmonic_map(const ExperimentConfig& cfg)
{
    cfg.validate();
    const DelzantPolytope P = cfg.make_polytope();
    const DomainN N = cfg.make_domain();
    return solve_harmonic_map(P, N, cfg.make_rho_grid(), cfg.boundary_potentials(P, N));
}

HarmonicMap solve_harmonic_map(const DelzantPolytope& P, const DomainN& N, const TensorGrid& rho,
    std::vector<SymplecticPotential> boundary)
{
    if(boundary.size() != N.boundary_nodes().size())
        throw std::invalid_argument("solve_harmonic_map: one boundary potential per boundary node required");
    if(rho.dim() != P.dim())
        throw std::invalid_argument("solve_harmonic_map: rho grid dimension differs from the polytope");
    for(const auto& b : boundary)
        if(b.dim() != P.dim())
            throw std::invalid_argument("solve_harmonic_map: boundary potential of wrong dimension");

    const auto W = kernel_table(N);
    std::vector<SymplecticPotential> u;
    u.reserve(N.size());
    for(std::size_t i = 0; i < N.size(); i++) {
        u.push_back(SymplecticPotential::combination(W[i], boundary));
        assert_convex(u.back(), N, i);
    }

    HarmonicMap map{P, N, rho, std::move(boundary), std::move(u), {}, {}};
    const std::size_t nr = rho.size();
    map.phi.resize(N.size() * nr);
    map.depth.resize(N.size() * nr);
    for(std::size_t i = 0; i < N.size(); i++) {
        const KahlerPotential phi = legendre_dual(map.u[i]);
        for(std::size_t r = 0; r < nr; r++) {
            const Vec z = rho.node(r);
            Jet j;
            try {
                j = phi.jet(z);
            } catch(const NumericalError& e) {
                std::ostringstream os;
                os << "solve_harmonic_map: at " << location(N, i) << ", rho = (" << z.transpose()
                   << "): " << e.what();
                throw NumericalError(os.str());
            }
            map.phi[i * nr + r] = j.value;
            map.depth[i * nr + r] = P.min_facet_value(as_span(j.grad));
        }
    }
    return map;
}

// ---------------------------------------------------------------- approximants

Approximant build_approximant(const HarmonicMap& map, int k, const QuadratureOptions& opt)
{
    Approximant A;
    A.level = k;
    for(const auto& b : map.boundary)
        A.boundary_tables.push_back(norming_constants(b, k, opt));
    A.norming = harmonic_norming(map.domain, A.boundary_tables);
    const std::size_t nr = map.rho.size(), na = A.norming.size();
    A.values.resize(map.domain.size() * nr);
    std::vector<double> lambda(na);
    for(std::size_t i = 0; i < map.domain.size(); i++) {
        for(std::size_t a = 0; a < na; a++)
            lambda[a] = A.norming.lambda[a][i];
        for(std::size_t r = 0; r < nr; r++)
            A.values[i * nr + r] = bergman_potential(A.norming.lattice, lambda, map.rho.node(r));
    }
    return A;
}

std::vector<Approximant> build_approximants(const ExperimentConfig& cfg, const HarmonicMap& map)
{
    std::vector<Approximant> out;
    for(int k : cfg.levels)
        out.push_back(build_approximant(map, k, cfg.quadrature));
    return out;
}

double poisson_exponent_crosscheck(const ExperimentConfig& cfg, const HarmonicMap& map, const Approximant& approx,
    const std::vector<std::size_t>& nodes, int panels, int order)
{
    const DomainN& N = map.domain;
    if(N.kind() != DomainKind::Disc)
        throw std::invalid_argument("poisson_exponent_crosscheck: disc domain required");
    const GaussRule rule = composite_rule(0, 2 * std::numbers::pi, panels, order);
    std::vector<NormingTable> tables;
    for(double theta : rule.nodes)
        tables.push_back(norming_constants(cfg.loop_member(map.polytope, theta), approx.level, cfg.quadrature));

    double worst = 0;
    for(std::size_t node : nodes) {
        const Vec y = N.node(node);
        const double r = std::hypot(y[0], y[1]), gamma = std::atan2(y[1], y[0]);
        if(r >= 1)
            throw std::invalid_argument("poisson_exponent_crosscheck: node on the boundary circle");
        for(std::size_t a = 0; a < approx.norming.size(); a++) {
            double integral = 0;
            for(std::size_t t = 0; t < rule.nodes.size(); t++)
                integral += rule.weights[t] * poisson_kernel(r, rule.nodes[t] - gamma) * tables[t].log_q[a];
            worst = std::max(worst, std::fabs(approx.norming.lambda[a][node] - integral));
        }
    }
    return worst;
}

// ---------------------------------------------------------------- errors

LevelErrors level_errors(const HarmonicMap& map, std::span<const double> approx, int k, double window,
    double reference_window)
{
    const DomainN& N = map.domain;
    const std::size_t nr = map.rho.size();
    if(approx.size() != map.phi.size())
        throw std::invalid_argument("level_errors: approximant grid differs from the harmonic map grid");

    std::vector<double> E(approx.size());
    for(std::size_t i = 0; i < E.size(); i++)
        E[i] = approx[i] - map.phi[i];

    const std::size_t ref = N.boundary_nodes().front();
    double mean = 0;
    std::size_t count = 0;
    for(std::size_t r = 0; r < nr; r++)
        if(map.depth[ref * nr + r] >= reference_window) {
            mean += E[ref * nr + r];
            count++;
        }
    if(count == 0)
        throw std::invalid_argument("level_errors: reference window contains no rho node");
    mean /= static_cast<double>(count);

    LevelErrors out;
    out.k = k;
    for(std::size_t i = 0; i < E.size(); i++)
        if(map.depth[i] >= window) {
            out.c0 = sup_abs(out.c0, E[i] - mean);
            out.c0_raw = sup_abs(out.c0_raw, E[i]);
        }

    const int m = map.rho.dim();
    if(N.kind() == DomainKind::Disc) {
        out.c1_y = out.c2_yrho = out.c2_yy = NaN;
        for(std::size_t i = 0; i < N.size(); i++) {
            const std::span<const double> slice(E.data() + i * nr, nr);
            for(std::size_t r = 0; r < nr; r++) {
                if(map.depth[i * nr + r] < window || !map.rho.is_interior(r, 2))
                    continue;
                const Vec g = fd_gradient(map.rho, slice, r);
                const Mat h = fd_hessian(map.rho, slice, r);
                out.c1_rho = std::max(out.c1_rho, g.cwiseAbs().maxCoeff());
                out.c2_rhorho = std::max(out.c2_rhorho, h.cwiseAbs().maxCoeff());
            }
        }
        return out;
    }

    std::vector<std::vector<double>> axes;
    for(int a = 0; a < N.dim(); a++)
        axes.push_back(N.axis(a));
    for(int a = 0; a < m; a++)
        axes.push_back(map.rho.axis(a));
    const TensorGrid G(axes);
    const int d = N.dim();
    for(std::size_t f = 0; f < E.size(); f++) {
        if(map.depth[f] < window || !G.is_interior(f, 2))
            continue;
        const Vec g = fd_gradient(G, E, f);
        const Mat h = fd_hessian(G, E, f);
        out.c1_y = std::max(out.c1_y, g.head(d).cwiseAbs().maxCoeff());
        out.c1_rho = std::max(out.c1_rho, g.tail(m).cwiseAbs().maxCoeff());
        out.c2_yy = std::max(out.c2_yy, h.topLeftCorner(d, d).cwiseAbs().maxCoeff());
        out.c2_yrho = std::max(out.c2_yrho, h.topRightCorner(d, m).cwiseAbs().maxCoeff());
        out.c2_rhorho = std::max(out.c2_rhorho, h.bottomRightCorner(m, m).cwiseAbs().maxCoeff());
    }
    return out;
}

ErrorReport error_report(const HarmonicMap& map, const std::vector<Approximant>& approx, double window,
    double reference_window)
{
    ErrorReport rep;
    rep.domain = map.domain.kind() == DomainKind::Interval ? "interval"
        : map.domain.kind() == DomainKind::Disc            ? "disc"
                                                           : "rectangle";
    rep.window = window;
    rep.nodes = map.domain.size();
    rep.rho_points = map.rho.size();
    for(const auto& A : approx)
        rep.levels.push_back(level_errors(map, A.values, A.level, window, reference_window));
    return rep;
}

RateFit rate_fit(std::span<const int> levels, std::span<const double> errors)
{
    if(levels.size() != errors.size())
        throw std::invalid_argument("rate_fit: levels and errors differ in length");
    if(levels.size() < 4)
        throw std::invalid_argument("rate_fit: at least four levels required");
    RateFit fit;
    for(std::size_t i = 0; i < levels.size(); i++) {
        if(levels[i] < 2)
            throw std::invalid_argument("rate_fit: levels must be at least 2");
        if(!(errors[i] >= 0) || !std::isfinite(errors[i]))
            throw std::invalid_argument("rate_fit: errors must be finite and nonnegative");
        if(errors[i] == 0)
            fit.exact = true;
    }
    if(fit.exact)
        return fit;

    std::vector<double> lk, le, stat, resid;
    for(std::size_t i = 0; i < levels.size(); i++) {
        const double k = levels[i];
        lk.push_back(std::log(k));
        le.push_back(std::log(errors[i]));
        stat.push_back(errors[i] * k / std::log(k));
        resid.push_back(le.back() - std::log(std::log(k) / k));
    }
    const LineFit line = fit_line(lk, le);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.r2 = line.r2;
    const auto [lo, hi] = std::minmax_element(stat.begin(), stat.end());
    double mean = 0;
    for(double s : stat)
        mean += s;
    mean /= static_cast<double>(stat.size());
    fit.flatness = (*hi - *lo) / mean;
    double c = 0;
    for(double r : resid)
        c += r;
    c /= static_cast<double>(resid.size());
    for(std::size_t i = 0; i < lk.size(); i++) {
        const double p = le[i] - (line.intercept + line.slope * lk[i]);
        fit.sse_power += p * p;
        fit.sse_logk_over_k += (resid[i] - c) * (resid[i] - c);
    }
    return fit;
}

void write_report_csv(std::ostream& os, const ErrorReport& report)
{
    os << "k,C0,C1_y,C1_rho,C2_rhorho,C2_yrho,C2_yy\n" << std::setprecision(17);
    for(const auto& l : report.levels)
        os << l.k << ',' << l.c0 << ',' << l.c1_y << ',' << l.c1_rho << ',' << l.c2_rhorho << ',' << l.c2_yrho
           << ',' << l.c2_yy << '\n';
}

void write_report_dat(std::ostream& os, const ErrorReport& report)
{
    os << "# domain " << report.domain << " window " << report.window << " nodes " << report.nodes
       << " rho_points " << report.rho_points << '\n'
       << "# k C0 C1_y C1_rho C2_rhorho C2_yrho C2_yy C0_raw\n"
       << std::setprecision(17);
    for(const auto& l : report.levels)
        os << l.k << ' ' << l.c0 << ' ' << l.c1_y << ' ' << l.c1_rho << ' ' << l.c2_rhorho << ' ' << l.c2_yrho
           << ' ' << l.c2_yy << ' ' << l.c0_raw << '\n';
}

}  // namespace toric
