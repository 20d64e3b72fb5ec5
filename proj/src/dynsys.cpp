#include "vvlab/dynsys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vvlab/error.hpp"

namespace vvlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Expr X() { return Expr::variable(Var::X); }
Expr Y() { return Expr::variable(Var::Y); }

double norm(const Point& p)
{
    return std::hypot(p[0], p[1]);
}

}  // namespace

FieldSpec::FieldSpec(std::string family, std::vector<double> params, int dim, std::array<Expr, 2> comps)
    : family_(std::move(family)), params_(std::move(params)), dim_(dim), period_(kTwoPi), comps_(std::move(comps))
{
    require(dim == 1 || dim == 2, "field dimension must be 1 or 2");
    if (dim == 1) comps_[1] = Expr{};
    const Var vars[2] = {Var::X, Var::Y};
    for (int i = 0; i < 2; ++i) {
        eval_[i] = CompiledExpr(comps_[i]);
        dlambda_[i] = CompiledExpr(comps_[i].derivative(Var::Lambda));
        for (int j = 0; j < 2; ++j) jac_[i][j] = CompiledExpr(comps_[i].derivative(vars[j]));
        takes_lambda_ = takes_lambda_ || comps_[i].depends_on(Var::Lambda);
    }
}

FieldSpec FieldSpec::zero(int dim)
{
    return FieldSpec("zero", {}, dim, {Expr{}, Expr{}});
}

FieldSpec FieldSpec::circle_sine()
{
    return FieldSpec("circle_sine", {}, 1, {-sin(X()), Expr{}});
}

FieldSpec FieldSpec::torus_morse()
{
    return FieldSpec("torus_morse", {}, 2, {sin(X()), sin(Y())});
}

FieldSpec FieldSpec::torus_cycles()
{
    return FieldSpec("torus_cycles", {}, 2, {Expr::constant(1.0), -sin(Y())});
}

FieldSpec FieldSpec::shifted_torus_cycles(double kappa)
{
    return FieldSpec("shifted_torus_cycles", {kappa}, 2, {Expr::constant(1.0), -(Expr::constant(kappa) * sin(Y()))});
}

FieldSpec FieldSpec::gradient(const Expr& phi, int dim)
{
    return FieldSpec("gradient", {}, dim, {phi.derivative(Var::X), dim == 2 ? phi.derivative(Var::Y) : Expr{}});
}

FieldSpec FieldSpec::expression(int dim, const Expr& bx, const Expr& by)
{
    return FieldSpec("expression", {}, dim, {bx, by});
}

FieldSpec FieldSpec::lyapunov_shift(const FieldSpec& omega, const Expr& lyapunov)
{
    const auto& c = omega.components();
    std::array<Expr, 2> comps{c[0] - lyapunov.derivative(Var::X), c[1] - lyapunov.derivative(Var::Y)};
    return FieldSpec("lyapunov_shift(" + omega.family() + ")", omega.params(), omega.dim(), comps);
}

Point FieldSpec::operator()(const Point& x, double lambda) const
{
    return {eval_[0](x, lambda), dim_ == 2 ? eval_[1](x, lambda) : 0.0};
}

Eigen::MatrixXd FieldSpec::jacobian(const Point& x, double lambda) const
{
    Eigen::MatrixXd J(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) J(i, j) = jac_[i][j](x, lambda);
    return J;
}

Point FieldSpec::d_lambda(const Point& x, double lambda) const
{
    return {dlambda_[0](x, lambda), dim_ == 2 ? dlambda_[1](x, lambda) : 0.0};
}

double FieldSpec::divergence(const Point& x, double lambda) const
{
    double d = jac_[0][0](x, lambda);
    if (dim_ == 2) d += jac_[1][1](x, lambda);
    return d;
}

Point FieldSpec::wrap(Point p) const
{
    for (int a = 0; a < 2; ++a) {
        if (a >= dim_) {
            p[a] = 0.0;
            continue;
        }
        p[a] = std::fmod(p[a], period_);
        if (p[a] < 0.0) p[a] += period_;
        if (p[a] >= period_) p[a] = 0.0;
    }
    return p;
}

Point FieldSpec::displacement(const Point& a, const Point& b) const
{
    Point d{std::remainder(a[0] - b[0], period_), 0.0};
    if (dim_ == 2) d[1] = std::remainder(a[1] - b[1], period_);
    return d;
}

double FieldSpec::distance(const Point& a, const Point& b) const
{
    return norm(displacement(a, b));
}

Eigen::MatrixXd jacobian_fd(const FieldSpec& spec, const Point& x, double lambda, double step)
{
    const int d = spec.dim();
    Eigen::MatrixXd J(d, d);
    for (int j = 0; j < d; ++j) {
        Point xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        const Point bp = spec(xp, lambda), bm = spec(xm, lambda);
        for (int i = 0; i < d; ++i) J(i, j) = (bp[i] - bm[i]) / (2.0 * step);
    }
    return J;
}

VectorSamples sample_field(const FieldSpec& spec, const PeriodicGrid& grid, double lambda)
{
    require(grid.dim() == spec.dim(), "grid and field dimensions differ");
    return sample_vector(grid, [&](const Point& x) { return spec(x, lambda); });
}

Point rk4_step(const FieldSpec& spec, const Point& x, double dt, double sign, double lambda)
{
    auto f = [&](const Point& p) {
        Point v = spec(p, lambda);
        return Point{sign * v[0], sign * v[1]};
    };
    const Point k1 = f(x);
    const Point k2 = f({x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]});
    const Point k3 = f({x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]});
    const Point k4 = f({x[0] + dt * k3[0], x[1] + dt * k3[1]});
    return {x[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            x[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

Trajectory flow(const FieldSpec& spec, const Point& x0, double t_final, double dt, Direction direction, double lambda)
{
    require(dt > 0.0, "flow step must be positive");
    require(t_final >= 0.0, "flow horizon must be non-negative");
    const double sign = direction == Direction::Forward ? 1.0 : -1.0;
    Trajectory tr;
    Point x = x0;
    double t = 0.0;
    tr.times.push_back(t);
    tr.points.push_back(spec.wrap(x));
    while (t < t_final) {
        const double h = std::min(dt, t_final - t);
        x = rk4_step(spec, x, h, sign, lambda);
        t = (t_final - t <= dt) ? t_final : t + h;
        x = spec.wrap(x);
        tr.times.push_back(t);
        tr.points.push_back(x);
    }
    return tr;
}

std::string to_string(FixedPointKind k)
{
    switch (k) {
        case FixedPointKind::Sink: return "sink";
        case FixedPointKind::Source: return "source";
        case FixedPointKind::Saddle: return "saddle";
        case FixedPointKind::NonHyperbolic: return "nonhyperbolic";
    }
    return "?";
}

double FixedPoint::slowest_rate() const
{
    double r = std::numeric_limits<double>::infinity();
    for (double re : eigen_real_parts) r = std::min(r, std::abs(re));
    return r;
}

double FixedPoint::unstable_trace() const
{
    double s = 0.0;
    for (double re : eigen_real_parts)
        if (re > 0.0) s += re;
    return s;
}

FixedPoint classify_fixed_point(const FieldSpec& spec, const Point& p, double lambda)
{
    FixedPoint fp;
    fp.position = spec.wrap(p);
    fp.jacobian = spec.jacobian(fp.position, lambda);
    fp.residual = norm(spec(fp.position, lambda));
    Eigen::EigenSolver<Eigen::MatrixXd> es(fp.jacobian, false);
    int neg = 0, pos = 0;
    bool degenerate = false;
    for (int i = 0; i < fp.jacobian.rows(); ++i) {
        const double re = es.eigenvalues()[i].real();
        fp.eigen_real_parts.push_back(re);
        if (std::abs(re) < kHyperbolicityFloor) degenerate = true;
        else if (re < 0.0) ++neg;
        else ++pos;
    }
    std::sort(fp.eigen_real_parts.begin(), fp.eigen_real_parts.end());
    if (degenerate) fp.kind = FixedPointKind::NonHyperbolic;
    else if (pos == 0) fp.kind = FixedPointKind::Sink;
    else if (neg == 0) fp.kind = FixedPointKind::Source;
    else fp.kind = FixedPointKind::Saddle;
    return fp;
}

std::vector<FixedPoint> find_fixed_points(const FieldSpec& spec, const PeriodicGrid& grid, double lambda)
{
    require(grid.dim() == spec.dim(), "grid and field dimensions differ");
    const int d = spec.dim();
    std::vector<double> speed2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point b = spec(grid.coord(i), lambda);
        speed2[i] = b[0] * b[0] + b[1] * b[1];
    }

    auto is_local_min = [&](std::size_t i) {
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = (d == 2 ? -1 : 0); dy <= (d == 2 ? 1 : 0); ++dy) {
                if (dx == 0 && dy == 0) continue;
                std::size_t j = grid.shifted(i, 0, dx);
                if (d == 2) j = grid.shifted(j, 1, dy);
                if (speed2[j] < speed2[i]) return false;
            }
        return true;
    };

    const double merge_radius = grid.h(0);
    std::vector<FixedPoint> found;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!is_local_min(i)) continue;
        Point x = grid.coord(i);
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            const Point b = spec(x, lambda);
            const Eigen::MatrixXd J = spec.jacobian(x, lambda);
            Eigen::VectorXd rhs(d);
            for (int k = 0; k < d; ++k) rhs(k) = -b[k];
            const double det = J.determinant();
            if (!std::isfinite(det) || std::abs(det) < 1e-14) break;
            const Eigen::VectorXd step = J.fullPivLu().solve(rhs);
            for (int k = 0; k < d; ++k) x[k] += step(k);
            if (step.norm() <= 1e-12) {
                converged = true;
                break;
            }
        }
        if (!converged) continue;
        x = spec.wrap(x);
        if (norm(spec(x, lambda)) > 1e-10) continue;
        const bool duplicate = std::any_of(found.begin(), found.end(),
                                           [&](const FixedPoint& f) { return spec.distance(f.position, x) <= merge_radius; });
        if (duplicate) continue;
        found.push_back(classify_fixed_point(spec, x, lambda));
    }
    std::sort(found.begin(), found.end(), [](const FixedPoint& a, const FixedPoint& b) {
        return a.position[1] != b.position[1] ? a.position[1] < b.position[1] : a.position[0] < b.position[0];
    });
    return found;
}

// ---------------------------------------------------------------------------
// Periodic orbits

namespace {

double segment_distance(const FieldSpec& spec, const Point& p, const Point& a, const Point& b)
{
    const Point seg = spec.displacement(b, a);
    const Point rel = spec.displacement(p, a);
    const double len2 = seg[0] * seg[0] + seg[1] * seg[1];
    double t = len2 > 0.0 ? (rel[0] * seg[0] + rel[1] * seg[1]) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(rel[0] - t * seg[0], rel[1] - t * seg[1]);
}

}  // namespace

void PeriodicOrbit::build_blocks()
{
    constexpr std::size_t kBlock = 32;
    block_begin.clear();
    block_center.clear();
    block_radius.clear();
    const std::size_t m = samples.size();
    for (std::size_t b = 0; b < m; b += kBlock) {
        const std::size_t e = std::min(m, b + kBlock);  // segments b..e-1 end at sample e (mod m)
        const Point c = samples[(b + e) / 2 % m];
        double r = 0.0;
        for (std::size_t k = b; k <= e; ++k) {
            const Point d{std::remainder(samples[k % m][0] - c[0], kTwoPi), std::remainder(samples[k % m][1] - c[1], kTwoPi)};
            r = std::max(r, std::hypot(d[0], d[1]));
        }
        block_begin.push_back(b);
        block_center.push_back(c);
        block_radius.push_back(r);
    }
}

double PeriodicOrbit::distance_to(const FieldSpec& spec, const Point& p) const
{
    double best = std::numeric_limits<double>::infinity();
    const std::size_t m = samples.size();
    if (block_begin.empty()) {
        for (std::size_t k = 0; k < m; ++k) best = std::min(best, segment_distance(spec, p, samples[k], samples[(k + 1) % m]));
        return best;
    }
    // Visit blocks nearest-first so the pruning bound tightens early.
    const std::size_t nb = block_begin.size();
    std::vector<std::pair<double, std::size_t>> order(nb);
    for (std::size_t b = 0; b < nb; ++b) order[b] = {spec.distance(p, block_center[b]) - block_radius[b], b};
    std::sort(order.begin(), order.end());
    for (const auto& [lower, b] : order) {
        if (lower >= best) break;
        const std::size_t e = b + 1 < nb ? block_begin[b + 1] : m;
        for (std::size_t k = block_begin[b]; k < e; ++k)
            best = std::min(best, segment_distance(spec, p, samples[k], samples[(k + 1) % m]));
    }
    return best;
}

std::pair<Point, Point> PeriodicOrbit::at_arclength(double l) const
{
    l = std::fmod(l, length);
    if (l < 0.0) l += length;
    const std::size_t m = samples.size();
    auto it = std::upper_bound(arclength.begin(), arclength.end(), l);
    const std::size_t k = static_cast<std::size_t>(std::distance(arclength.begin(), it)) - 1;
    const std::size_t k1 = (k + 1) % m;
    const double l1 = k + 1 < m ? arclength[k + 1] : length;
    const double t = (l - arclength[k]) / (l1 - arclength[k]);
    // Segment vector on the universal cover.
    Point seg{samples[k1][0] - samples[k][0], samples[k1][1] - samples[k][1]};
    constexpr double P = kTwoPi;
    for (double& s : seg) s = std::remainder(s, P);
    const double len = std::hypot(seg[0], seg[1]);
    Point pos{samples[k][0] + t * seg[0], samples[k][1] + t * seg[1]};
    return {pos, {seg[0] / len, seg[1] / len}};
}

namespace {

struct ReturnResult {
    bool ok = false;
    Point end{};
    double time = 0.0;
};

// Integrate xdot = sign*b from `start` (unwrapped) until the section
// coordinate has advanced by one full period in either direction.
ReturnResult first_return(const FieldSpec& spec, const Point& start, int axis, double sign, const OrbitSearchOptions& o)
{
    const double P = spec.period();
    const double q0 = start[axis];
    Point x = start;
    double t = 0.0;
    ReturnResult r;
    while (t < o.t_max) {
        const Point xn = rk4_step(spec, x, o.dt, sign);
        const double travelled = xn[axis] - q0;
        if (std::abs(travelled) >= P) {
            const double target = q0 + std::copysign(P, travelled);
            // Secant/bisection on the partial step length.
            double lo = 0.0, hi = o.dt;
            double flo = x[axis] - target, fhi = xn[axis] - target;
            double tau = hi;
            Point xt = xn;
            for (int it = 0; it < 100; ++it) {
                tau = (fhi != flo) ? lo - flo * (hi - lo) / (fhi - flo) : 0.5 * (lo + hi);
                if (!(tau > lo && tau < hi)) tau = 0.5 * (lo + hi);
                xt = rk4_step(spec, x, tau, sign);
                const double ft = xt[axis] - target;
                if (std::abs(ft) <= 1e-15 * P || hi - lo < 1e-16) break;
                if ((ft < 0.0) == (flo < 0.0)) {
                    lo = tau;
                    flo = ft;
                } else {
                    hi = tau;
                    fhi = ft;
                }
            }
            r.ok = true;
            r.end = xt;
            r.time = t + tau;
            return r;
        }
        x = xn;
        t += o.dt;
    }
    return r;
}

}  // namespace

std::vector<PeriodicOrbit> find_periodic_orbits(const FieldSpec& spec, int section_axis, int n_sections,
                                                const OrbitSearchOptions& opts)
{
    require(spec.dim() == 2, "periodic orbit search needs a two-dimensional field");
    require(section_axis == 0 || section_axis == 1, "section axis must be 0 or 1");
    require(n_sections >= 4, "need at least 4 section seeds");
    const int other = 1 - section_axis;
    const double P = spec.period();

    auto start_point = [&](double s) {
        Point p{0.0, 0.0};
        p[section_axis] = 0.0;
        p[other] = s;
        return p;
    };

    std::vector<PeriodicOrbit> orbits;
    for (double sign : {1.0, -1.0}) {
        auto displacement = [&](double s, bool& ok) {
            const ReturnResult r = first_return(spec, start_point(s), section_axis, sign, opts);
            ok = r.ok;
            return ok ? std::remainder(r.end[other] - s, P) : 0.0;
        };

        std::vector<double> seeds(n_sections + 1), disp(n_sections + 1);
        std::vector<bool> valid(n_sections + 1);
        for (int k = 0; k <= n_sections; ++k) {
            seeds[k] = P * k / n_sections;
            bool ok;
            disp[k] = displacement(seeds[k], ok);
            valid[k] = ok;
        }

        for (int k = 0; k < n_sections; ++k) {
            if (!valid[k] || !valid[k + 1]) continue;
            double a = seeds[k], b = seeds[k + 1];
            double fa = disp[k], fb = disp[k + 1];
            if (std::abs(fa) > P / 4 || std::abs(fb) > P / 4) continue;
            double s;
            if (fa == 0.0) s = a;
            else if (fb == 0.0) continue;  // picked up as the left end of the next interval
            else if ((fa < 0.0) == (fb < 0.0)) continue;
            else {
                // Newton on the return displacement, safeguarded by the bracket.
                s = 0.5 * (a + b);
                for (int it = 0; it < opts.max_newton * 4; ++it) {
                    bool ok;
                    const double fs = displacement(s, ok);
                    if (!ok) break;
                    if (std::abs(fs) <= opts.newton_tol) break;
                    if ((fs < 0.0) == (fa < 0.0)) {
                        a = s;
                        fa = fs;
                    } else {
                        b = s;
                        fb = fs;
                    }
                    const double hd = 1e-7;
                    bool okp, okm;
                    const double dp = displacement(s + hd, okp), dm = displacement(s - hd, okm);
                    double next = 0.5 * (a + b);
                    if (okp && okm) {
                        const double deriv = (dp - dm) / (2.0 * hd);
                        if (deriv != 0.0) {
                            const double cand = s - fs / deriv;
                            if (cand > a && cand < b) next = cand;
                        }
                    }
                    if (b - a < 1e-15) break;
                    s = next;
                }
            }

            // Dense sampling over one return in the search direction.
            const ReturnResult ret = first_return(spec, start_point(s), section_axis, sign, opts);
            if (!ret.ok) continue;
            const double T = ret.time;
            const int steps = std::max(256, static_cast<int>(std::ceil(T / opts.dt)));
            const double h = T / steps;
            std::vector<Point> pts{start_point(s)};
            for (int i = 0; i < steps; ++i) pts.push_back(rk4_step(spec, pts.back(), h, sign));
            const double gap = spec.distance(pts.back(), pts.front());
            if (gap > 1e-8) continue;
            pts.pop_back();
            if (sign < 0.0) std::reverse(pts.begin() + 1, pts.end());

            PeriodicOrbit orb;
            orb.period = T;
            orb.closure_gap = gap;
            orb.section_coordinate = spec.wrap(start_point(s))[other];
            double div_sum = 0.0;
            for (const Point& p : pts) div_sum += spec.divergence(p);
            orb.floquet_log = div_sum * h / T;
            // Contracting in the search direction only; the other direction finds the rest.
            if (sign * orb.floquet_log > kHyperbolicityFloor) continue;

            const bool dup = std::any_of(orbits.begin(), orbits.end(), [&](const PeriodicOrbit& o) {
                return std::abs(std::remainder(o.section_coordinate - orb.section_coordinate, P)) < 1e-6;
            });
            if (dup) continue;

            const std::size_t m = pts.size();
            orb.arclength.assign(m, 0.0);
            std::vector<double> speed(m);
            for (std::size_t i = 0; i < m; ++i) speed[i] = norm(spec(pts[i]));
            for (std::size_t i = 1; i < m; ++i) orb.arclength[i] = orb.arclength[i - 1] + 0.5 * h * (speed[i - 1] + speed[i]);
            orb.length = orb.arclength.back() + 0.5 * h * (speed[m - 1] + speed[0]);
            for (auto& p : pts) p = spec.wrap(p);
            orb.samples = std::move(pts);
            orb.build_blocks();
            orbits.push_back(std::move(orb));
        }
    }
    std::sort(orbits.begin(), orbits.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) { return a.section_coordinate < b.section_coordinate; });
    return orbits;
}

double RecurrentSet::slowest_attraction() const
{
    double r = std::numeric_limits<double>::infinity();
    for (const auto& fp : fixed_points)
        if (fp.kind == FixedPointKind::Sink) r = std::min(r, fp.slowest_rate());
    for (const auto& o : orbits)
        if (o.hyperbolic() && o.attracting()) r = std::min(r, std::abs(o.floquet_log));
    return r;
}

double RecurrentSet::distance_to(const FieldSpec& spec, const Point& p) const
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto& fp : fixed_points) d = std::min(d, spec.distance(fp.position, p));
    for (const auto& o : orbits) d = std::min(d, o.distance_to(spec, p));
    return d;
}

RecurrentSet classify_recurrent_set(const FieldSpec& spec, const PeriodicGrid& grid, int section_axis, int n_sections,
                                    const OrbitSearchOptions& opts)
{
    RecurrentSet rs;
    rs.fixed_points = find_fixed_points(spec, grid);
    if (spec.dim() == 2) rs.orbits = find_periodic_orbits(spec, section_axis, n_sections, opts);
    for (const auto& fp : rs.fixed_points)
        if (!fp.hyperbolic())
            rs.violations.push_back("non-hyperbolic fixed point at (" + std::to_string(fp.position[0]) + ", " +
                                    std::to_string(fp.position[1]) + ")");
    for (const auto& o : rs.orbits)
        if (!o.hyperbolic())
            rs.violations.push_back("non-hyperbolic periodic orbit through section coordinate " +
                                    std::to_string(o.section_coordinate));
    rs.morse_smale = rs.violations.empty() && (!rs.fixed_points.empty() || !rs.orbits.empty());
    return rs;
}

double compute_b0(const FieldSpec& spec, const PeriodicGrid& grid, const std::vector<double>& lambda_samples)
{
    require(!spec.takes_lambda() || !lambda_samples.empty(), "lambda-dependent field needs lambda samples for b0");
    const std::vector<double> lams = lambda_samples.empty() ? std::vector<double>{0.0} : lambda_samples;
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.coord(i);
        for (double lam : lams) {
            const Eigen::MatrixXd J = spec.jacobian(x, lam);
            if (spec.dim() == 1) {
                sup = std::max(sup, J(0, 0));
                continue;
            }
            const double a = J(0, 0), d = J(1, 1), off = 0.5 * (J(0, 1) + J(1, 0));
            const double top = 0.5 * (a + d) + std::hypot(0.5 * (a - d), off);
            sup = std::max(sup, top);
        }
    }
    return sup;
}

std::vector<int> basin_labels(const FieldSpec& spec, const PeriodicGrid& grid, const RecurrentSet& rs, double dt)
{
    std::vector<const FixedPoint*> sinks;
    std::vector<const PeriodicOrbit*> cycles;
    for (const auto& fp : rs.fixed_points)
        if (fp.kind == FixedPointKind::Sink) sinks.push_back(&fp);
    for (const auto& o : rs.orbits)
        if (o.hyperbolic() && o.attracting()) cycles.push_back(&o);
    std::vector<int> labels(grid.size(), -1);
    if (sinks.empty() && cycles.empty()) return labels;

    const double T = 20.0 / rs.slowest_attraction();
    constexpr double kMatch = 1e-3;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Point x = grid.coord(i);
        for (double t = 0.0; t < T; t += dt) x = rk4_step(spec, x, std::min(dt, T - t));
        x = spec.wrap(x);
        int label = -1;
        for (std::size_t k = 0; k < sinks.size() && label < 0; ++k)
            if (spec.distance(sinks[k]->position, x) <= kMatch) label = static_cast<int>(k);
        for (std::size_t k = 0; k < cycles.size() && label < 0; ++k)
            if (cycles[k]->distance_to(spec, x) <= kMatch) label = static_cast<int>(sinks.size() + k);
        labels[i] = label;
    }
    return labels;
}

ScalarSamples separatrix_mask(const FieldSpec& spec, const PeriodicGrid& grid, const RecurrentSet& rs,
                              double tube_radius, double dt)
{
    require(tube_radius >= 0.0, "tube radius must be non-negative");
    const std::vector<int> labels = basin_labels(spec, grid, rs, dt);
    std::vector<Point> seeds;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool boundary = labels[i] < 0;
        for (int a = 0; a < grid.dim() && !boundary; ++a)
            for (int off : {-1, 1})
                if (labels[grid.shifted(i, a, off)] != labels[i]) boundary = true;
        if (boundary) seeds.push_back(grid.coord(i));
    }
    for (const auto& fp : rs.fixed_points)
        if (fp.kind != FixedPointKind::Sink) seeds.push_back(fp.position);

    ScalarSamples mask(grid, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.coord(i);
        bool hit = std::any_of(seeds.begin(), seeds.end(), [&](const Point& s) { return spec.distance(s, x) <= tube_radius; });
        for (const auto& o : rs.orbits)
            if (!hit && !o.attracting() && o.distance_to(spec, x) <= tube_radius) hit = true;
        mask[i] = hit ? 1.0 : 0.0;
    }
    return mask;
}

}  // namespace vvlab
