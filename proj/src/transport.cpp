#include "vvlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

#include "vvlab/error.hpp"
#include "vvlab/spectral.hpp"

namespace vvlab {

namespace {

struct CharState {
    Point x;
    double E = 0.0;  // int_0^t c
    double I = 0.0;  // int_0^t f exp(-E)
};

CharState char_rhs(const FieldFn& b, const PointFn& c, const PointFn& f, const CharState& s)
{
    const Point v = b(s.x);
    return {{-v[0], -v[1]}, c(s.x), f(s.x) * std::exp(-s.E)};
}

CharState axpy(const CharState& s, double a, const CharState& k)
{
    return {{s.x[0] + a * k.x[0], s.x[1] + a * k.x[1]}, s.E + a * k.E, s.I + a * k.I};
}

CharState char_step(const FieldFn& b, const PointFn& c, const PointFn& f, const CharState& s, double h)
{
    const CharState k1 = char_rhs(b, c, f, s);
    const CharState k2 = char_rhs(b, c, f, axpy(s, 0.5 * h, k1));
    const CharState k3 = char_rhs(b, c, f, axpy(s, 0.5 * h, k2));
    const CharState k4 = char_rhs(b, c, f, axpy(s, h, k3));
    CharState out = s;
    out.x[0] += h / 6.0 * (k1.x[0] + 2.0 * k2.x[0] + 2.0 * k3.x[0] + k4.x[0]);
    out.x[1] += h / 6.0 * (k1.x[1] + 2.0 * k2.x[1] + 2.0 * k3.x[1] + k4.x[1]);
    out.E += h / 6.0 * (k1.E + 2.0 * k2.E + 2.0 * k3.E + k4.E);
    out.I += h / 6.0 * (k1.I + 2.0 * k2.I + 2.0 * k3.I + k4.I);
    return out;
}

CharState integrate_to(const FieldFn& b, const PointFn& c, const PointFn& f, CharState s, double t0, double t1,
                       double dt)
{
    if (t1 <= t0) return s;
    const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
    const double h = (t1 - t0) / steps;
    for (int k = 0; k < steps; ++k) s = char_step(b, c, f, s, h);
    return s;
}

double residual_at(const Point& bx, double cx, double fx, const Point& grad, double u)
{
    return std::abs(bx[0] * grad[0] + bx[1] * grad[1] + cx * u - fx);
}

void fill_diagnostics(TransportSolution& sol, const FieldFn& b, const PointFn& c, const PointFn& f)
{
    const PeriodicGrid& g = sol.u.grid;
    const VectorSamples grad = gradient_fd(sol.u);
    sol.grad_max = 0.0;
    sol.residual_off_mask = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.coord(i);
        const Point gi = grad.at(i);
        sol.residual[i] = residual_at(b(x), c(x), f(x), gi, sol.u[i]);
        sol.grad_max = std::max(sol.grad_max, std::hypot(gi[0], gi[1]));
        if (sol.mask[i] == 0.0) sol.residual_off_mask = std::max(sol.residual_off_mask, sol.residual[i]);
    }
}

}  // namespace

double characteristic_integral(const FieldFn& b, const PointFn& c, const PointFn& f, const Point& x, double T,
                               double dt)
{
    require(dt > 0.0 && T >= 0.0, "characteristic integral needs dt > 0 and T >= 0");
    return integrate_to(b, c, f, CharState{x}, 0.0, T, dt).I;
}

std::vector<double> characteristic_partial_integrals(const FieldFn& b, const PointFn& c, const PointFn& f,
                                                     const Point& x, const std::vector<double>& times, double dt)
{
    require(dt > 0.0, "step must be positive");
    require(std::is_sorted(times.begin(), times.end()), "truncation times must be sorted");
    std::vector<double> out;
    out.reserve(times.size());
    CharState s{x};
    double t = 0.0;
    for (double T : times) {
        require(T >= 0.0, "truncation times must be non-negative");
        s = integrate_to(b, c, f, s, t, T, dt);
        t = std::max(t, T);
        out.push_back(s.I);
    }
    return out;
}

std::pair<Point, double> characteristic_endpoint(const FieldFn& b, const PointFn& c, const Point& x, double tau,
                                                 double dt)
{
    const PointFn zero = [](const Point&) { return 0.0; };
    const CharState s = integrate_to(b, c, zero, CharState{x}, 0.0, tau, dt);
    return {s.x, std::exp(-s.E)};
}

TransportSolution solve_linear_fn(const FieldFn& b, const PointFn& c, const PointFn& f, const PeriodicGrid& grid,
                                  const TransportOptions& opts)
{
    require(opts.dt > 0.0, "characteristic step must be positive");
    require(opts.tail_tol > 0.0 && opts.tail_tol < 1.0, "tail tolerance must lie in (0, 1)");
    TransportSolution sol(grid);
    sol.c0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) sol.c0 = std::min(sol.c0, c(grid.coord(i)));
    if (!(sol.c0 > 0.0)) {
        std::ostringstream os;
        os << "transport needs inf c > 0 (got " << sol.c0 << ")";
        throw PreconditionError(os.str());
    }
    sol.horizon = std::log(1.0 / opts.tail_tol) / sol.c0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        sol.u[i] = characteristic_integral(b, c, f, grid.coord(i), sol.horizon, opts.dt);
    fill_diagnostics(sol, b, c, f);
    return sol;
}

TransportSolution solve_linear(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                               const PeriodicGrid& grid, const TransportOptions& opts)
{
    require(grid.dim() == b.dim(), "grid and field dimensions differ");
    const FieldFn bf = [&](const Point& x) { return b(x); };
    const PointFn cf = [&](const Point& x) { return c(x); };
    const PointFn ff = [&](const Point& x) { return f(x); };

    double c0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) c0 = std::min(c0, c(grid.coord(i)));
    require(c0 > 0.0, "transport needs inf c > 0");

    const RecurrentSet rs = classify_recurrent_set(b, grid);
    const ScalarSamples mask = separatrix_mask(b, grid, rs, opts.tube_radius, opts.mask_dt);

    TransportSolution sol = solve_linear_fn(bf, cf, ff, grid, opts);
    sol.mask = mask;
    sol.b0 = compute_b0(b, grid);
    fill_diagnostics(sol, bf, cf, ff);
    if (sol.c0 - sol.b0 <= 0.0) {
        std::ostringstream os;
        os << "inf c - b0 = " << sol.c0 - sol.b0 << " <= 0: gradient bound not guaranteed";
        sol.warnings.push_back(os.str());
    }
    for (const auto& fp : rs.fixed_points)
        for (double re : fp.eigen_real_parts)
            if (re >= sol.c0) {
                std::ostringstream os;
                os << "c0 = " << sol.c0 << " does not exceed the eigenvalue " << re << " of Db at ("
                   << fp.position[0] << ", " << fp.position[1] << ")";
                sol.warnings.push_back(os.str());
            }
    return sol;
}

ScalarSamples viscous_solve(double eps, const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                            const PeriodicGrid& grid)
{
    const VectorSamples bs = sample_field(b, grid);
    const ScalarSamples cs = sample(grid, [&](const Point& x) { return c(x); });
    const OperatorAssembly op = assemble(grid, eps, bs, cs, Scheme::ExponentialFitted);
    Eigen::SparseMatrix<double> A(op.matrix);
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw PreconditionError("viscous operator is singular");
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) rhs(static_cast<Eigen::Index>(i)) = f(grid.coord(i));
    const Eigen::VectorXd u = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !u.allFinite()) throw PreconditionError("viscous operator is singular");
    return ScalarSamples(grid, std::vector<double>(u.data(), u.data() + u.size()));
}

double sup_distance_off_mask(const ScalarSamples& a, const ScalarSamples& b, const ScalarSamples& mask)
{
    require(a.size() == b.size() && a.size() == mask.size(), "fields differ in size");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (mask[i] == 0.0) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

OscillationResult oscillation_indicator(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                                        const Point& x, const std::vector<double>& times, double window, double dt)
{
    require(!times.empty(), "oscillation indicator needs truncation times");
    require(window > 0.0, "oscillation window must be positive");
    OscillationResult r;
    r.times = times;
    r.window = window;
    r.partial = characteristic_partial_integrals([&](const Point& p) { return b(p); },
                                                 [&](const Point& p) { return c(p); },
                                                 [&](const Point& p) { return f(p); }, x, times, dt);
    const double t_last = times.back();
    double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] >= t_last - window) {
            hi = std::max(hi, r.partial[k]);
            lo = std::min(lo, r.partial[k]);
        }
    r.osc = hi - lo;
    return r;
}

HyperbolicityConstants hyperbolicity_constants(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                                               const PeriodicGrid& grid, double lambda_lo, double lambda_hi,
                                               int n_lambda)
{
    require(std::isfinite(lambda_lo) && std::isfinite(lambda_hi) && lambda_lo < lambda_hi,
            "lambda range must be a finite interval");
    require(n_lambda >= 64, "lambda range must be sampled at >= 64 points");
    std::vector<double> lams(n_lambda);
    for (int k = 0; k < n_lambda; ++k) lams[k] = lambda_lo + (lambda_hi - lambda_lo) * k / (n_lambda - 1);

    HyperbolicityConstants K;
    K.b0 = compute_b0(b, grid, lams);
    K.inf_c = std::numeric_limits<double>::infinity();
    double inf_lambda_term = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.coord(i);
        const Point gf = f.gradient(x);
        const double fx = f(x);
        K.sup_grad_f = std::max(K.sup_grad_f, std::hypot(gf[0], gf[1]));
        for (double l : lams) {
            const Point dl = b.d_lambda(x, l);
            K.gamma = std::max(K.gamma, std::hypot(dl[0], dl[1]));
            const double cx = c(x, l);
            const double cl = c.d_lambda(x, l);
            const Point gc = c.gradient(x, l);
            K.inf_c = std::min(K.inf_c, cx);
            K.sup_f_over_c = std::max(K.sup_f_over_c, fx / cx);
            K.sup_dc_dx = std::max(K.sup_dc_dx, std::hypot(gc[0], gc[1]));
            K.sup_dc_dlambda = std::max(K.sup_dc_dlambda, std::abs(cl));
            K.sup_f_dc_dlambda = std::max(K.sup_f_dc_dlambda, fx * std::abs(cl));
            inf_lambda_term = std::min(inf_lambda_term, cx + l * cl);
        }
    }
    K.a0 = K.inf_c - K.b0;
    K.A = K.sup_grad_f + K.sup_f_over_c * K.sup_dc_dx;
    K.beta = K.sup_dc_dlambda * K.sup_f_over_c;
    K.Lambda = inf_lambda_term - K.b0;
    return K;
}

ConditionVerdict check_conditions(const HyperbolicityConstants& k)
{
    ConditionVerdict v;
    v.cond1 = k.a0 > k.beta;
    v.cond2 = k.a0 * k.a0 + k.beta * k.beta >= 2.0 * k.a0 * k.beta + 4.0 * k.gamma * k.sup_grad_f;
    v.cond3 = k.Lambda * k.Lambda - 4.0 * k.A * k.gamma >= 0.0;
    v.c0_large = k.inf_c * (k.inf_c - k.b0) > k.sup_f_dc_dlambda;
    return v;
}

NonlinearResult solve_nonlinear(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                                const ScalarSamples& u0, double lambda_lo, double lambda_hi,
                                const NonlinearOptions& opts)
{
    const PeriodicGrid& grid = u0.grid;
    require(grid.dim() == b.dim(), "grid and field dimensions differ");
    require(opts.tol > 0.0 && opts.max_iterations > 0, "invalid Picard options");

    const HyperbolicityConstants K = hyperbolicity_constants(b, c, f, grid, lambda_lo, lambda_hi);
    NonlinearResult res(grid);
    res.conditions = check_conditions(K);
    res.flagged = !res.conditions.all();
    require(K.inf_c > 0.0, "nonlinear transport needs inf c > 0 over the lambda range");

    double sup_f = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) sup_f = std::max(sup_f, std::abs(f(grid.coord(i))));
    const double bound = 10.0 * sup_f / K.inf_c;

    TransportOptions topts;
    topts.dt = opts.dt;
    topts.tail_tol = opts.tail_tol;

    ScalarSamples u = u0;
    auto lam = [&](const ScalarSamples& s, const Point& x) { return interpolate_cubic(s, grid.wrap(x)); };
    const PointFn ff = [&](const Point& x) { return f(x); };
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const FieldFn bf = [&](const Point& x) { return b(x, lam(u, x)); };
        const PointFn cf = [&](const Point& x) { return c(x, lam(u, x)); };
        TransportSolution next = solve_linear_fn(bf, cf, ff, grid, topts);
        double diff = 0.0, unorm = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            diff = std::max(diff, std::abs(next.u[i] - u[i]));
            unorm = std::max(unorm, std::abs(next.u[i]));
        }
        res.history.push_back(diff);
        res.iterations = it;
        if (!(unorm <= bound)) {
            std::ostringstream os;
            os << "Picard iterate diverged: ||u||_inf = " << unorm << " > " << bound << " at iteration " << it;
            throw ConvergenceError(os.str());
        }
        u = next.u;
        if (opts.monitor) {
            const std::string why = opts.monitor(u);
            if (!why.empty()) throw ConvergenceError(why + " at iteration " + std::to_string(it));
        }
        if (diff <= opts.tol) {
            // Diagnostics with the coefficients frozen at the converged iterate.
            const FieldFn bu = [&](const Point& x) { return b(x, lam(u, x)); };
            const PointFn cu = [&](const Point& x) { return c(x, lam(u, x)); };
            next.u = u;
            fill_diagnostics(next, bu, cu, ff);
            next.b0 = K.b0;
            if (res.flagged) next.warnings.push_back("hyperbolicity conditions not all satisfied; result flagged");
            res.solution = std::move(next);
            const auto& h = res.history;
            if (h.size() >= 2 && h.front() > 0.0 && h.back() > 0.0)
                res.contraction_ratio = std::pow(h.back() / h.front(), 1.0 / static_cast<double>(h.size() - 1));
            return res;
        }
    }
    std::ostringstream os;
    os << "Picard iteration did not converge in " << opts.max_iterations << " iterations (last step "
       << res.history.back() << ")";
    throw ConvergenceError(os.str());
}

BranchTable count_branches(const ScalarFunction& c, const ScalarFunction& f, const std::vector<Point>& fixed_points,
                           double lambda_lo, double lambda_hi)
{
    require(lambda_lo < lambda_hi, "lambda bracket must be a proper interval");
    constexpr int kCells = 1024;
    BranchTable table;
    table.total = 1;
    for (const Point& P : fixed_points) {
        const double fP = f(P);
        auto g = [&](double u) { return c(P, u) * u - fP; };
        auto dg = [&](double u) { return c(P, u) + u * c.d_lambda(P, u); };
        FixedPointBranches fb;
        fb.position = P;
        std::vector<double> roots;
        double u0 = lambda_lo, g0 = g(u0);
        if (g0 == 0.0) roots.push_back(u0);
        for (int k = 1; k <= kCells; ++k) {
            const double u1 = lambda_lo + (lambda_hi - lambda_lo) * k / kCells;
            const double g1 = g(u1);
            if (g1 == 0.0) {
                roots.push_back(u1);
            } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
                double a = u0, b = u1, ga = g0;
                for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a)); ++it) {
                    const double m = 0.5 * (a + b);
                    const double gm = g(m);
                    if (gm == 0.0) {
                        a = b = m;
                        break;
                    }
                    if ((gm < 0.0) == (ga < 0.0)) {
                        a = m;
                        ga = gm;
                    } else {
                        b = m;
                    }
                }
                roots.push_back(0.5 * (a + b));
            }
            u0 = u1;
            g0 = g1;
        }
        for (double r : roots) {
            BranchRoot br{r, dg(r), false};
            br.degenerate = std::abs(br.derivative) < 1e-8;
            if (!br.degenerate) ++fb.k;
            fb.roots.push_back(br);
        }
        table.total *= fb.k;
        table.points.push_back(std::move(fb));
    }
    if (fixed_points.empty()) table.total = 0;
    return table;
}

BranchEnumeration enumerate_branches(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                                     const PeriodicGrid& grid, const BranchTable& table, double lambda_lo,
                                     double lambda_hi, const NonlinearOptions& opts)
{
    require(!table.points.empty(), "branch enumeration needs fixed points");
    BranchEnumeration out;
    out.combinatorial = table.total;

    const std::size_t p = table.points.size();
    std::vector<std::vector<double>> simple(p);
    for (std::size_t i = 0; i < p; ++i)
        for (const auto& r : table.points[i].roots)
            if (!r.degenerate) simple[i].push_back(r.value);
    for (const auto& s : simple)
        if (s.empty()) return out;

    // Gaussian partition of unity around the fixed points.
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
            sep = std::min(sep, grid.distance(table.points[i].position, table.points[j].position));
    const double sigma = std::isfinite(sep) ? 0.25 * sep : 1.0;
    std::vector<std::vector<double>> w(p, std::vector<double>(grid.size()));
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Point x = grid.coord(n);
        double total = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            const double d = grid.distance(x, table.points[i].position) / sigma;
            w[i][n] = std::exp(-d * d);
            total += w[i][n];
        }
        if (total > 0.0) {
            for (std::size_t i = 0; i < p; ++i) w[i][n] /= total;
        } else {
            for (std::size_t i = 0; i < p; ++i) w[i][n] = 1.0 / static_cast<double>(p);
        }
    }

    // Seeds sit slightly off the roots, so a root that repels the Picard map
    // is left rather than reproduced to rounding.
    constexpr double kSeedOffset = 1e-3;
    std::vector<int> choice(p, 0);
    for (;;) {
        BranchSeed seed;
        seed.choice = choice;
        ScalarSamples u0(grid);
        for (std::size_t n = 0; n < grid.size(); ++n)
            for (std::size_t i = 0; i < p; ++i) u0[n] += w[i][n] * (simple[i][choice[i]] + kSeedOffset);
        // Half the gap to the nearest other root at each point.
        std::vector<double> reach(p, std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t k = 0; k < simple[i].size(); ++k)
                if (static_cast<int>(k) != choice[i])
                    reach[i] = std::min(reach[i], 0.5 * std::abs(simple[i][k] - simple[i][choice[i]]));
        NonlinearOptions seed_opts = opts;
        seed_opts.monitor = [&](const ScalarSamples& u) -> std::string {
            for (std::size_t i = 0; i < p; ++i)
                if (std::abs(interpolate_cubic(u, table.points[i].position) - simple[i][choice[i]]) > reach[i])
                    return "iterate left the chosen root at fixed point " + std::to_string(i);
            return {};
        };
        try {
            const NonlinearResult r = solve_nonlinear(b, c, f, u0, lambda_lo, lambda_hi, seed_opts);
            seed.converged = true;
            seed.contraction_ratio = r.contraction_ratio;
            seed.iterations = r.iterations;
            bool on_branch = true;
            for (std::size_t i = 0; i < p; ++i)
                if (std::abs(interpolate_cubic(r.solution.u, table.points[i].position) - simple[i][choice[i]]) > 1e-4)
                    on_branch = false;
            int idx = -1;
            for (std::size_t s = 0; s < out.solutions.size(); ++s) {
                double d = 0.0;
                for (std::size_t n = 0; n < grid.size(); ++n)
                    d = std::max(d, std::abs(out.solutions[s][n] - r.solution.u[n]));
                if (d <= 1e-4) idx = static_cast<int>(s);
            }
            if (on_branch && idx < 0) {
                out.solutions.push_back(r.solution.u);
                idx = static_cast<int>(out.solutions.size()) - 1;
            }
            seed.solution_index = on_branch ? idx : -1;
            seed.status = on_branch ? "realized" : "converged to another branch";
        } catch (const ConvergenceError& e) {
            seed.status = e.what();
        }
        out.seeds.push_back(std::move(seed));

        std::size_t i = 0;
        while (i < p && ++choice[i] == static_cast<int>(simple[i].size())) choice[i++] = 0;
        if (i == p) break;
    }

    out.min_pairwise_distance = out.solutions.size() >= 2 ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t a = 0; a < out.solutions.size(); ++a)
        for (std::size_t b2 = a + 1; b2 < out.solutions.size(); ++b2) {
            double d = 0.0;
            for (std::size_t n = 0; n < grid.size(); ++n)
                d = std::max(d, std::abs(out.solutions[a][n] - out.solutions[b2][n]));
            out.min_pairwise_distance = std::min(out.min_pairwise_distance, d);
            out.max_pairwise_distance = std::max(out.max_pairwise_distance, d);
        }
    return out;
}

}  // namespace vvlab
