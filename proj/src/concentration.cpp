#include "vvlab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vvlab/error.hpp"

namespace vvlab {

std::string to_string(WeightKind k)
{
    switch (k) {
        case WeightKind::None: return "none";
        case WeightKind::Potential: return "exp(-phi/eps)";
        case WeightKind::Lyapunov: return "exp(-L/eps)";
    }
    return "?";
}

Measure weighted_measure(const EigenResult& u, WeightKind kind, const ScalarFunction& W)
{
    const PeriodicGrid& grid = u.u.grid;
    require(u.eps > 0.0, "measure needs the eps of the eigenpair");
    for (double v : u.u.values) require(v >= -1e-12, "measure needs a non-negative eigenfunction");

    std::vector<double> w(grid.size(), 1.0);
    if (kind != WeightKind::None) {
        std::vector<double> wv(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) wv[i] = W(grid.coord(i));
        const double wmin = *std::min_element(wv.begin(), wv.end());
        for (std::size_t i = 0; i < grid.size(); ++i) w[i] = std::exp((wmin - wv[i]) / u.eps);
    }

    Measure m{ScalarSamples(grid), kind, u.eps};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ui = std::max(u.u[i], 0.0);
        m.density[i] = w[i] * ui * ui;
    }
    const double total = integrate(m.density);
    if (!(total >= 1e-300)) {
        std::ostringstream os;
        os << "weighted measure mass " << total << " underflows at eps=" << u.eps << " (eps too small for the grid)";
        throw PreconditionError(os.str());
    }
    for (double& v : m.density.values) v /= total;
    return m;
}

namespace {

double max_spacing(const PeriodicGrid& g)
{
    double h = g.h(0);
    if (g.dim() == 2) h = std::max(h, g.h(1));
    return h;
}

// Fraction of a node's cell, measured across the tube, that lies within
// half_width. Keeps tube masses consistent with the transversal integrals.
double tube_weight(const PeriodicGrid& g, double d, double half_width)
{
    const double w = g.dim() == 2 ? std::sqrt(g.cell_volume()) : g.h(0);
    return std::clamp(0.5 + (half_width - d) / w, 0.0, 1.0);
}

}  // namespace

double ball_mass(const Measure& m, const Point& P, double delta)
{
    const PeriodicGrid& g = m.density.grid;
    require(delta >= 2.0 * max_spacing(g) - 1e-12, "ball radius must be at least two grid spacings");
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.distance(g.coord(i), P) <= delta) s += m.density[i];
    return s * g.cell_volume();
}

double tube_mass(const Measure& m, const PeriodicOrbit& orbit, const FieldSpec& spec, double half_width)
{
    const PeriodicGrid& g = m.density.grid;
    require(half_width >= 2.0 * max_spacing(g) - 1e-12, "tube half-width must be at least two grid spacings");
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += tube_weight(g, orbit.distance_to(spec, g.coord(i)), half_width) * m.density[i];
    return s * g.cell_volume();
}

CycleDensity cycle_density(const Measure& m, const PeriodicOrbit& orbit, const FieldSpec& spec, int n_stations,
                           double half_width, const std::vector<PeriodicOrbit>& others)
{
    const PeriodicGrid& g = m.density.grid;
    require(g.dim() == 2, "cycle densities need a two-dimensional grid");
    require(orbit.hyperbolic(), "cycle density needs a hyperbolic orbit");
    require(n_stations >= 2, "need at least two stations");
    require(half_width > 0.0, "half-width must be positive");

    // Curvature from consecutive tangents: |dtheta| / ds.
    double kappa = 0.0;
    const std::size_t ms = orbit.samples.size();
    for (std::size_t k = 0; k < ms; ++k) {
        const Point a = spec.displacement(orbit.samples[(k + 1) % ms], orbit.samples[k]);
        const Point b = spec.displacement(orbit.samples[(k + 2) % ms], orbit.samples[(k + 1) % ms]);
        const double la = std::hypot(a[0], a[1]), lb = std::hypot(b[0], b[1]);
        if (la <= 0.0 || lb <= 0.0) continue;
        const double cross = a[0] * b[1] - a[1] * b[0], dot = a[0] * b[0] + a[1] * b[1];
        kappa = std::max(kappa, std::abs(std::atan2(cross, dot)) / (0.5 * (la + lb)));
    }
    if (half_width * kappa >= 1.0) throw PreconditionError("transversal segments intersect (reduce half_width)");
    for (const auto& o : others) {
        if (std::abs(std::remainder(o.section_coordinate - orbit.section_coordinate, spec.period())) < 1e-9) continue;
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : o.samples) d = std::min(d, orbit.distance_to(spec, p));
        if (d <= 2.0 * half_width)
            throw PreconditionError("transversal segments reach another orbit's tube (reduce half_width)");
    }

    CycleDensity cd;
    for (int k = 0; k < n_stations; ++k) {
        const double l = orbit.length * k / n_stations;
        const auto [p, t] = orbit.at_arclength(l);
        const Point nrm{-t[1], t[0]};
        // Break the segment where it crosses grid lines: the bilinear
        // interpolant is quadratic in between, so Simpson is exact there.
        std::vector<double> cuts{-half_width, half_width};
        for (int a = 0; a < 2; ++a) {
            if (std::abs(nrm[a]) < 1e-14) continue;
            const double ha = g.h(a);
            const double e0 = p[a] - half_width * nrm[a], e1 = p[a] + half_width * nrm[a];
            for (double j = std::ceil(std::min(e0, e1) / ha); j * ha <= std::max(e0, e1); j += 1.0) {
                const double tc = (j * ha - p[a]) / nrm[a];
                if (tc > -half_width && tc < half_width) cuts.push_back(tc);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        auto at = [&](double off) { return interpolate_linear(m.density, {p[0] + off * nrm[0], p[1] + off * nrm[1]}); };
        double s = 0.0;
        for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
            const double a = cuts[q], b = cuts[q + 1];
            if (b - a <= 0.0) continue;
            s += (b - a) / 6.0 * (at(a) + 4.0 * at(0.5 * (a + b)) + at(b));
        }
        cd.stations.push_back(l);
        cd.values.push_back(s);
    }
    double vmax = -std::numeric_limits<double>::infinity(), vmin = std::numeric_limits<double>::infinity();
    for (double v : cd.values) {
        cd.mean += v;
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
    }
    cd.mean /= n_stations;
    cd.integral = cd.mean * orbit.length;
    cd.relative_spread = cd.mean > 0.0 ? (vmax - vmin) / cd.mean : 0.0;
    return cd;
}

ConcentrationTargets targets_from(const RecurrentSet& rs)
{
    ConcentrationTargets t;
    for (const auto& fp : rs.fixed_points) {
        t.centers.push_back(fp.position);
        t.center_labels.push_back(to_string(fp.kind));
    }
    t.orbits = rs.orbits;
    return t;
}

ConcentrationTargets targets_from_minima(const ScalarSamples& a)
{
    const PeriodicGrid& g = a.grid;
    ConcentrationTargets t;
    for (std::size_t i = 0; i < g.size(); ++i) {
        bool is_min = true;
        for (int ax = 0; ax < g.dim() && is_min; ++ax)
            for (int o : {-1, 1})
                if (!(a[i] < a[g.shifted(i, ax, o)])) is_min = false;
        if (g.dim() == 2 && is_min)
            for (int ox : {-1, 1})
                for (int oy : {-1, 1})
                    if (!(a[i] < a[g.shifted(g.shifted(i, 0, ox), 1, oy)])) is_min = false;
        if (is_min) {
            t.centers.push_back(g.coord(i));
            t.center_labels.push_back("minimum");
        }
    }
    return t;
}

ConcentrationReport concentration_report(const std::vector<EigenResult>& sweep, WeightKind kind, const ScalarFunction& W,
                                         const ConcentrationTargets& targets, const FieldSpec& spec,
                                         const ConcentrationOptions& opts)
{
    require(!sweep.empty(), "concentration report needs a non-empty sweep");
    require(!targets.centers.empty() || !targets.orbits.empty(), "no concentration targets");
    const PeriodicGrid& g = sweep.front().u.grid;
    for (std::size_t a = 0; a < targets.centers.size(); ++a) {
        for (std::size_t b = a + 1; b < targets.centers.size(); ++b)
            if (g.distance(targets.centers[a], targets.centers[b]) < 2.0 * opts.delta)
                throw PreconditionError("balls around distinct centres overlap (delta too large)");
        for (const auto& o : targets.orbits)
            if (o.distance_to(spec, targets.centers[a]) < opts.delta + opts.half_width)
                throw PreconditionError("ball overlaps an orbit tube (reduce delta or half_width)");
    }
    for (std::size_t a = 0; a < targets.orbits.size(); ++a)
        for (std::size_t b = a + 1; b < targets.orbits.size(); ++b) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& p : targets.orbits[b].samples) d = std::min(d, targets.orbits[a].distance_to(spec, p));
            if (d < 2.0 * opts.half_width) throw PreconditionError("orbit tubes overlap (reduce half_width)");
        }

    ConcentrationReport rep;
    rep.targets = targets;
    rep.weight_kind = kind;
    rep.delta = opts.delta;
    rep.half_width = opts.half_width;
    rep.n_stations = opts.n_stations;
    require(opts.delta >= 2.0 * max_spacing(g) - 1e-12, "ball radius must be at least two grid spacings");
    require(targets.orbits.empty() || opts.half_width >= 2.0 * max_spacing(g) - 1e-12,
            "tube half-width must be at least two grid spacings");
    // Node membership is eps-independent; compute it once.
    using Members = std::vector<std::pair<std::size_t, double>>;
    std::vector<Members> balls(targets.centers.size()), tubes(targets.orbits.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.coord(i);
        for (std::size_t k = 0; k < targets.centers.size(); ++k)
            if (g.distance(x, targets.centers[k]) <= opts.delta) balls[k].emplace_back(i, 1.0);
        for (std::size_t k = 0; k < targets.orbits.size(); ++k) {
            const double w = tube_weight(g, targets.orbits[k].distance_to(spec, x), opts.half_width);
            if (w > 0.0) tubes[k].emplace_back(i, w);
        }
    }
    auto mass = [&](const Measure& m, const Members& nodes) {
        double s = 0.0;
        for (const auto& [i, w] : nodes) s += w * m.density[i];
        return s * g.cell_volume();
    };
    for (const auto& r : sweep) {
        const Measure m = weighted_measure(r, kind, W);
        ConcentrationEntry e;
        e.eps = r.eps;
        double assigned = 0.0;
        for (const auto& nodes : balls) {
            e.ball_masses.push_back(mass(m, nodes));
            assigned += e.ball_masses.back();
        }
        for (std::size_t k = 0; k < targets.orbits.size(); ++k) {
            const auto& o = targets.orbits[k];
            e.tube_masses.push_back(mass(m, tubes[k]));
            assigned += e.tube_masses.back();
            e.cycle_densities.push_back(cycle_density(m, o, spec, opts.n_stations, opts.half_width, targets.orbits));
        }
        e.residual_mass = 1.0 - assigned;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

double richardson_linear(double eps1, double v1, double eps2, double v2)
{
    require(eps1 != eps2, "extrapolation needs distinct eps values");
    return v2 - eps2 * (v1 - v2) / (eps1 - eps2);
}

SimplexVerdict simplex_check(const ConcentrationReport& report)
{
    SimplexVerdict v;
    v.residual_nonincreasing = true;
    const auto& E = report.entries;
    for (std::size_t k = 0; k < E.size(); ++k) {
        double s = E[k].residual_mass;
        for (double b : E[k].ball_masses) s += b;
        for (double t : E[k].tube_masses) s += t;
        v.max_bookkeeping_error = std::max(v.max_bookkeeping_error, std::abs(s - 1.0));
        if (k > 0 && E[k].residual_mass > E[k - 1].residual_mass + 1e-12) v.residual_nonincreasing = false;
    }
    v.bookkeeping = v.max_bookkeeping_error <= 1e-8;
    if (E.empty()) return v;
    auto limit = [&](auto get) {
        if (E.size() < 2) return get(E.back());
        const auto& a = E[E.size() - 2];
        const auto& b = E.back();
        return richardson_linear(a.eps, get(a), b.eps, get(b));
    };
    for (std::size_t i = 0; i < E.back().ball_masses.size(); ++i)
        v.ball_limits.push_back(limit([i](const ConcentrationEntry& e) { return e.ball_masses[i]; }));
    for (std::size_t i = 0; i < E.back().tube_masses.size(); ++i)
        v.tube_limits.push_back(limit([i](const ConcentrationEntry& e) { return e.tube_masses[i]; }));
    v.residual_limit = limit([](const ConcentrationEntry& e) { return e.residual_mass; });
    return v;
}

}  // namespace vvlab
