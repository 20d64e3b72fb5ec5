#include "vvlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vvlab/concentration.hpp"
#include "vvlab/dynsys.hpp"
#include "vvlab/error.hpp"
#include "vvlab/lyapunov.hpp"
#include "vvlab/spectral.hpp"
#include "vvlab/transport.hpp"

namespace vvlab {

using nlohmann::json;

namespace {

json point_json(const Point& p, int dim)
{
    return dim == 2 ? json::array({p[0], p[1]}) : json::array({p[0]});
}

json num(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string point_text(const Point& p, int dim)
{
    std::ostringstream os;
    os.precision(6);
    os << "(" << p[0];
    if (dim == 2) os << ", " << p[1];
    os << ")";
    return os.str();
}

json base_report(const std::string& sub, const ExperimentConfig& ex)
{
    json r;
    r["subcommand"] = sub;
    r["fixture"] = ex.fixture;
    r["config"] = ex.raw.echo();
    return r;
}

class Csv {
public:
    explicit Csv(std::initializer_list<std::string> header)
    {
        bool first = true;
        for (const auto& h : header) {
            os_ << (first ? "" : ",") << h;
            first = false;
        }
        os_ << "\r\n";
    }
    template <class... Ts>
    void row(const Ts&... cells)
    {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
        os_ << "\r\n";
    }
    std::string str() const { return os_.str(); }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& s)
    {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    static std::string cell(const char* s) { return cell(std::string(s)); }
    std::ostringstream os_;
};

EigenProblem problem_of(const ExperimentConfig& ex)
{
    return {ex.grid, ex.field, ex.c, ex.scheme, ex.allow_central};
}

WeightKind weight_of(const ExperimentConfig& ex, ScalarFunction& W)
{
    if (ex.weight == "phi") {
        W = *ex.phi;
        return WeightKind::Potential;
    }
    if (ex.weight == "lyapunov") {
        W = *ex.lyapunov;
        return WeightKind::Lyapunov;
    }
    return WeightKind::None;
}

json fixed_point_json(const FixedPoint& fp, int dim)
{
    json j;
    j["position"] = point_json(fp.position, dim);
    j["kind"] = to_string(fp.kind);
    j["eigen_real_parts"] = fp.eigen_real_parts;
    j["residual"] = fp.residual;
    return j;
}

json orbit_json(const PeriodicOrbit& o)
{
    json j;
    j["section_coordinate"] = o.section_coordinate;
    j["period"] = o.period;
    j["length"] = o.length;
    j["floquet_log"] = o.floquet_log;
    j["closure_gap"] = o.closure_gap;
    j["attracting"] = o.attracting();
    return j;
}

json recurrent_json(const RecurrentSet& rs, int dim)
{
    json j;
    j["fixed_points"] = json::array();
    for (const auto& fp : rs.fixed_points) j["fixed_points"].push_back(fixed_point_json(fp, dim));
    j["orbits"] = json::array();
    for (const auto& o : rs.orbits) j["orbits"].push_back(orbit_json(o));
    j["morse_smale"] = rs.morse_smale;
    j["violations"] = rs.violations;
    return j;
}

RunOutput run_eigen(const ExperimentConfig& ex)
{
    if (ex.epsilons.empty()) throw PreconditionError("sweep.epsilons: eigen needs at least one eps");
    RunOutput out;
    out.report = base_report("eigen", ex);
    const EigenProblem prob = problem_of(ex);
    const auto sweep = epsilon_sweep(prob, ex.epsilons);

    Csv csv({"eps", "lambda", "eps_lambda", "residual", "iterations"});
    json results = json::array();
    std::ostringstream summary;
    summary << "eps                     lambda                  residual    iterations\n";
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        const auto& r = sweep[k];
        const MMatrixCheck mm = check_m_matrix(assemble_problem(prob, r.eps));
        json e;
        e["eps"] = r.eps;
        e["lambda"] = r.lambda;
        e["eps_lambda"] = r.eps * r.lambda;
        e["residual"] = r.residual;
        e["iterations"] = r.iterations;
        e["m_matrix"] = {{"offdiag_nonpositive", mm.offdiag_nonpositive}, {"max_abs_row_sum", mm.max_abs_row_sum}};
        e["u_min"] = *std::min_element(r.u.values.begin(), r.u.values.end());
        e["u_max"] = *std::max_element(r.u.values.begin(), r.u.values.end());
        if (ex.phi) {
            std::vector<std::string> warnings;
            gradient_transform(*ex.phi, r.eps, ex.c, ex.grid, &warnings);
            const EigenResult t = principal_eigenpair(transformed_assembly(*ex.phi, r.eps, ex.c, ex.grid));
            e["transformed_lambda"] = t.lambda;
            e["admissibility_warnings"] = warnings;
        }
        results.push_back(e);
        csv.row(r.eps, r.lambda, r.eps * r.lambda, r.residual, r.iterations);
        out.artifacts.push_back({"eigenfunction_" + std::to_string(k) + ".csv", field_csv(r.u)});
        char line[160];
        std::snprintf(line, sizeof line, "%-23.17g %-23.17g %-11.3g %d\n", r.eps, r.lambda, r.residual, r.iterations);
        summary << line;
    }
    out.report["results"] = results;
    out.report["scheme"] = to_string(ex.scheme);
    out.artifacts.push_back({"sweep.csv", csv.str()});
    out.summary = summary.str();
    return out;
}

ConcentrationTargets targets_of(const ExperimentConfig& ex, RecurrentSet* rs_out = nullptr)
{
    if (ex.family == "zero" && !ex.lyapunov)
        return targets_from_minima(sample(ex.grid, [&](const Point& x) { return ex.c(x); }));
    RecurrentSet rs = classify_recurrent_set(ex.field, ex.grid, ex.section_axis, ex.n_sections);
    if (!rs.morse_smale) {
        std::string msg = "recurrent set is not Morse-Smale";
        for (const auto& v : rs.violations) msg += "; " + v;
        throw PreconditionError(msg);
    }
    if (rs_out) *rs_out = rs;
    return targets_from(rs);
}

json entry_json(const ConcentrationEntry& e)
{
    json j;
    j["eps"] = e.eps;
    j["ball_masses"] = e.ball_masses;
    j["tube_masses"] = e.tube_masses;
    j["residual_mass"] = e.residual_mass;
    j["cycle_densities"] = json::array();
    for (const auto& cd : e.cycle_densities)
        j["cycle_densities"].push_back({{"stations", cd.stations},
                                        {"values", cd.values},
                                        {"integral", cd.integral},
                                        {"mean", cd.mean},
                                        {"relative_spread", cd.relative_spread}});
    return j;
}

RunOutput run_concentrate(const ExperimentConfig& ex)
{
    if (ex.epsilons.empty()) throw PreconditionError("sweep.epsilons: concentrate needs at least one eps");
    RunOutput out;
    out.report = base_report("concentrate", ex);
    const auto sweep = epsilon_sweep(problem_of(ex), ex.epsilons);
    ScalarFunction W;
    const WeightKind kind = weight_of(ex, W);
    const ConcentrationTargets targets = targets_of(ex);

    ConcentrationOptions opts{ex.delta, ex.tube_half_width, ex.n_stations};
    const ConcentrationReport rep = concentration_report(sweep, kind, W, targets, ex.field, opts);
    const SimplexVerdict verdict = simplex_check(rep);

    json centers = json::array();
    for (std::size_t i = 0; i < targets.centers.size(); ++i)
        centers.push_back({{"position", point_json(targets.centers[i], ex.grid.dim())},
                           {"label", targets.center_labels[i]}});
    json orbits = json::array();
    for (const auto& o : targets.orbits) orbits.push_back(orbit_json(o));
    out.report["centers"] = centers;
    out.report["orbits"] = orbits;
    out.report["weight"] = to_string(kind);
    out.report["delta"] = rep.delta;
    out.report["half_width"] = rep.half_width;
    out.report["n_stations"] = rep.n_stations;
    out.report["entries"] = json::array();
    for (const auto& e : rep.entries) out.report["entries"].push_back(entry_json(e));
    out.report["simplex"] = {{"bookkeeping", verdict.bookkeeping},
                             {"max_bookkeeping_error", verdict.max_bookkeeping_error},
                             {"residual_nonincreasing", verdict.residual_nonincreasing},
                             {"ball_limits", verdict.ball_limits},
                             {"tube_limits", verdict.tube_limits},
                             {"residual_limit", verdict.residual_limit}};

    // Independence checks: 2*delta balls, wider transversals.
    json variants = json::array();
    auto add_variant = [&](double delta, double hw) {
        json v{{"delta", delta}, {"half_width", hw}};
        try {
            const ConcentrationOptions o{delta, hw, ex.n_stations};
            const ConcentrationReport r = concentration_report({sweep.back()}, kind, W, targets, ex.field, o);
            v["entry"] = entry_json(r.entries.back());
        } catch (const PreconditionError& e) {
            v["refused"] = e.what();
        }
        variants.push_back(v);
    };
    if (!targets.centers.empty()) add_variant(2.0 * ex.delta, ex.tube_half_width);
    for (double hw : ex.extra_half_widths) add_variant(ex.delta, hw);
    out.report["variants"] = variants;

    Csv csv({"eps", "quantity", "index", "station", "value"});
    std::ostringstream summary;
    summary << "eps        balls      tubes      residual\n";
    for (const auto& e : rep.entries) {
        double balls = 0.0, tubes = 0.0;
        for (std::size_t i = 0; i < e.ball_masses.size(); ++i) {
            csv.row(e.eps, "ball_mass", i, 0.0, e.ball_masses[i]);
            balls += e.ball_masses[i];
        }
        for (std::size_t i = 0; i < e.tube_masses.size(); ++i) {
            csv.row(e.eps, "tube_mass", i, 0.0, e.tube_masses[i]);
            tubes += e.tube_masses[i];
            const auto& cd = e.cycle_densities[i];
            for (std::size_t s = 0; s < cd.values.size(); ++s) csv.row(e.eps, "cycle_density", i, cd.stations[s], cd.values[s]);
        }
        csv.row(e.eps, "residual_mass", 0, 0.0, e.residual_mass);
        char line[128];
        std::snprintf(line, sizeof line, "%-10.4g %-10.6f %-10.6f %-10.3e\n", e.eps, balls, tubes, e.residual_mass);
        summary << line;
    }
    out.artifacts.push_back({"concentration.csv", csv.str()});
    out.summary = summary.str();
    return out;
}

RunOutput run_transport(const ExperimentConfig& ex)
{
    RunOutput out;
    out.report = base_report("transport", ex);
    TransportOptions topts;
    topts.dt = ex.dt;
    topts.tail_tol = ex.tail_tol;
    topts.tube_radius = ex.tube_radius;
    const TransportSolution sol = solve_linear(ex.field, ex.c, ex.f, ex.grid, topts);
    const RecurrentSet rs = classify_recurrent_set(ex.field, ex.grid, ex.section_axis, ex.n_sections);
    const int dim = ex.grid.dim();

    json fps = json::array();
    Csv fcsv({"x", "y", "kind", "u", "f_over_c"});
    std::ostringstream summary;
    summary << "fixed point            kind     u(P)                  f(P)/c(P)\n";
    for (const auto& fp : rs.fixed_points) {
        const double u = interpolate_cubic(sol.u, fp.position);
        const double target = ex.f(fp.position) / ex.c(fp.position);
        fps.push_back({{"position", point_json(fp.position, dim)},
                       {"kind", to_string(fp.kind)},
                       {"u", u},
                       {"f_over_c", target},
                       {"error", std::abs(u - target)}});
        fcsv.row(fp.position[0], fp.position[1], to_string(fp.kind), u, target);
        char line[160];
        std::snprintf(line, sizeof line, "%-22s %-8s %-21.15g %.15g\n", point_text(fp.position, dim).c_str(),
                      to_string(fp.kind).c_str(), u, target);
        summary << line;
    }
    out.report["fixed_points"] = fps;
    out.report["orbits"] = json::array();
    for (const auto& o : rs.orbits) out.report["orbits"].push_back(orbit_json(o));
    out.report["c0"] = sol.c0;
    out.report["b0"] = sol.b0;
    out.report["horizon"] = sol.horizon;
    out.report["grad_max"] = sol.grad_max;
    out.report["residual_off_mask"] = sol.residual_off_mask;
    out.report["warnings"] = sol.warnings;
    double fc_min = INFINITY, fc_max = -INFINITY, u_min = INFINITY, u_max = -INFINITY;
    for (std::size_t i = 0; i < ex.grid.size(); ++i) {
        const Point x = ex.grid.coord(i);
        fc_min = std::min(fc_min, ex.f(x) / ex.c(x));
        fc_max = std::max(fc_max, ex.f(x) / ex.c(x));
        u_min = std::min(u_min, sol.u[i]);
        u_max = std::max(u_max, sol.u[i]);
    }
    out.report["maximum_principle"] = {{"u_min", u_min}, {"u_max", u_max}, {"f_over_c_min", fc_min}, {"f_over_c_max", fc_max}};

    Csv vcsv({"eps", "sup_off_mask"});
    json visc = json::array();
    for (double eps : ex.transport_epsilons) {
        const ScalarSamples ue = viscous_solve(eps, ex.field, ex.c, ex.f, ex.grid);
        const double d = sup_distance_off_mask(ue, sol.u, sol.mask);
        visc.push_back({{"eps", eps}, {"sup_off_mask", d}});
        vcsv.row(eps, d);
    }
    out.report["viscous"] = visc;

    if (!ex.osc_points.empty()) {
        std::vector<double> times;
        const double step = ex.osc_window / 64.0;
        for (int k = 0; k * step <= ex.osc_t_max + 1e-12; ++k) times.push_back(k * step);
        Csv ocsv({"point", "T", "u_T"});
        json osc = json::array();
        for (std::size_t p = 0; p < ex.osc_points.size(); ++p) {
            const auto r = oscillation_indicator(ex.field, ex.c, ex.f, ex.osc_points[p], times, ex.osc_window, ex.dt);
            osc.push_back({{"point", point_json(ex.osc_points[p], dim)}, {"osc", r.osc}, {"final", r.partial.back()}});
            for (std::size_t k = 0; k < times.size(); ++k) ocsv.row(p, times[k], r.partial[k]);
        }
        out.report["oscillation"] = osc;
        out.artifacts.push_back({"oscillation.csv", ocsv.str()});
    }

    out.artifacts.push_back({"transport_u.csv", field_csv(sol.u)});
    out.artifacts.push_back({"transport_residual.csv", field_csv(sol.residual)});
    out.artifacts.push_back({"transport_mask.csv", field_csv(sol.mask)});
    out.artifacts.push_back({"fixed_points.csv", fcsv.str()});
    out.artifacts.push_back({"viscous.csv", vcsv.str()});
    summary << "residual off mask: " << format_number(sol.residual_off_mask) << "\n";
    out.summary = summary.str();
    return out;
}

RunOutput run_nonlinear(const ExperimentConfig& ex)
{
    if (!(ex.lambda_lo < ex.lambda_hi)) throw PreconditionError("analysis.lambda_lo/lambda_hi: need lambda_lo < lambda_hi");
    RunOutput out;
    out.report = base_report("nonlinear", ex);
    const HyperbolicityConstants K =
        hyperbolicity_constants(ex.field, ex.c, ex.f, ex.grid, ex.lambda_lo, ex.lambda_hi, ex.n_lambda);
    const ConditionVerdict cv = check_conditions(K);
    out.report["constants"] = {{"b0", K.b0},           {"gamma", K.gamma},         {"a0", K.a0},
                               {"A", K.A},             {"beta", K.beta},           {"Lambda", K.Lambda},
                               {"inf_c", K.inf_c},     {"sup_grad_f", K.sup_grad_f}, {"sup_f_over_c", K.sup_f_over_c},
                               {"sup_dc_dx", K.sup_dc_dx}, {"sup_dc_dlambda", K.sup_dc_dlambda},
                               {"sup_f_dc_dlambda", K.sup_f_dc_dlambda}};
    out.report["conditions"] = {{"cond1", cv.cond1}, {"cond2", cv.cond2}, {"cond3", cv.cond3}, {"c0_large", cv.c0_large}};

    NonlinearOptions nopts;
    nopts.tol = ex.picard_tol;
    nopts.dt = ex.picard_dt;
    nopts.tail_tol = ex.picard_tail_tol;
    const NonlinearResult primary =
        solve_nonlinear(ex.field, ex.c, ex.f, ScalarSamples(ex.grid, ex.u0), ex.lambda_lo, ex.lambda_hi, nopts);
    out.report["primary"] = {{"iterations", primary.iterations},
                             {"history", primary.history},
                             {"contraction_ratio", primary.contraction_ratio},
                             {"flagged", primary.flagged},
                             {"residual_max", *std::max_element(primary.solution.residual.values.begin(),
                                                                primary.solution.residual.values.end())},
                             {"warnings", primary.solution.warnings}};
    out.artifacts.push_back({"solution.csv", field_csv(primary.solution.u)});

    const double mid = 0.5 * (ex.lambda_lo + ex.lambda_hi);
    std::vector<Point> pts;
    for (const auto& fp : find_fixed_points(ex.field, ex.grid, mid)) pts.push_back(fp.position);
    const BranchTable table = count_branches(ex.c, ex.f, pts, ex.lambda_lo, ex.lambda_hi);
    json bt = json::array();
    Csv bcsv({"x", "y", "root", "derivative", "degenerate"});
    for (const auto& p : table.points) {
        json roots = json::array();
        for (const auto& r : p.roots) {
            roots.push_back({{"value", r.value}, {"derivative", r.derivative}, {"degenerate", r.degenerate}});
            bcsv.row(p.position[0], p.position[1], r.value, r.derivative, r.degenerate ? "true" : "false");
        }
        bt.push_back({{"position", point_json(p.position, ex.grid.dim())}, {"roots", roots}, {"k", p.k}});
    }
    out.report["branches"] = {{"points", bt}, {"total", table.total}};
    out.artifacts.push_back({"branches.csv", bcsv.str()});

    const BranchEnumeration en =
        enumerate_branches(ex.field, ex.c, ex.f, ex.grid, table, ex.lambda_lo, ex.lambda_hi, nopts);
    json seeds = json::array();
    for (const auto& s : en.seeds)
        seeds.push_back({{"choice", s.choice},
                         {"converged", s.converged},
                         {"status", s.status},
                         {"contraction_ratio", s.contraction_ratio},
                         {"iterations", s.iterations},
                         {"solution_index", s.solution_index}});
    out.report["enumeration"] = {{"combinatorial", en.combinatorial},
                                 {"realized", en.solutions.size()},
                                 {"seeds", seeds},
                                 {"min_pairwise_distance", en.min_pairwise_distance},
                                 {"max_pairwise_distance", en.max_pairwise_distance}};
    for (std::size_t k = 0; k < en.solutions.size(); ++k)
        out.artifacts.push_back({"branch_solution_" + std::to_string(k) + ".csv", field_csv(en.solutions[k])});

    std::ostringstream summary;
    summary << "b0 " << format_number(K.b0) << "  gamma " << format_number(K.gamma) << "  a0 " << format_number(K.a0)
            << "\nA " << format_number(K.A) << "  beta " << format_number(K.beta) << "  Lambda "
            << format_number(K.Lambda) << "\nconditions " << cv.cond1 << cv.cond2 << cv.cond3
            << "\nPicard: " << primary.iterations << " iterations, ratio " << format_number(primary.contraction_ratio)
            << "\nbranches: " << table.total << " combinatorial, " << en.solutions.size() << " realized\n";
    out.summary = summary.str();
    return out;
}

RunOutput run_verify(const ExperimentConfig& ex)
{
    RunOutput out;
    out.report = base_report("verify", ex);
    const int dim = ex.grid.dim();
    const RecurrentSet rs = classify_recurrent_set(ex.omega, ex.grid, ex.section_axis, ex.n_sections);
    out.report["recurrent_set"] = recurrent_json(rs, dim);
    std::ostringstream summary;
    summary << "fixed points: " << rs.fixed_points.size() << ", periodic orbits: " << rs.orbits.size()
            << ", Morse-Smale: " << (rs.morse_smale ? "yes" : "no") << "\n";

    json local = json::array();
    for (const auto& fp : rs.fixed_points) {
        if (!fp.hyperbolic()) continue;
        const LocalLyapunov ll = quadratic_local_lyapunov(fp);
        json M = json::array(), S = json::array();
        for (Eigen::Index i = 0; i < ll.M.rows(); ++i) {
            std::vector<double> mr, sr;
            for (Eigen::Index j = 0; j < ll.M.cols(); ++j) {
                mr.push_back(ll.M(i, j));
                sr.push_back(ll.signature(i, j));
            }
            M.push_back(mr);
            S.push_back(sr);
        }
        local.push_back({{"position", point_json(fp.position, dim)}, {"M", M}, {"signature", S}});
    }
    out.report["local_lyapunov"] = local;

    bool pass = rs.morse_smale;
    if (ex.lyapunov) {
        LyapunovOptions lo{ex.lyapunov_tol, ex.lyapunov_delta};
        const LyapunovReport lr = verify_lyapunov(*ex.lyapunov, ex.omega, rs, ex.grid, lo);
        json locs = json::array();
        for (const auto& p : lr.min_locations) locs.push_back(point_json(p, dim));
        out.report["lyapunov"] = {{"nonnegative", lr.nonnegative},
                                  {"minimum_on_recurrent", lr.minimum_on_recurrent},
                                  {"positive_off_recurrent", lr.positive_off_recurrent},
                                  {"delta", lr.delta},
                                  {"tol", lr.tol},
                                  {"min_value", lr.min_value},
                                  {"margin", num(lr.margin)},
                                  {"min_locations_count", lr.min_locations.size()},
                                  {"offending_nodes", lr.offending_nodes},
                                  {"pass", lr.pass()}};
        pass = pass && lr.pass();
        summary << "Psi min " << format_number(lr.min_value) << ", margin " << format_number(lr.margin)
                << ", verdicts " << lr.nonnegative << lr.minimum_on_recurrent << lr.positive_off_recurrent << "\n";
    }
    out.report["pass"] = pass;
    summary << (pass ? "PASS" : "FAIL") << "\n";
    out.summary = summary.str();
    return out;
}

RunOutput run_pressure(const ExperimentConfig& ex)
{
    if (ex.epsilons.size() < 2) throw PreconditionError("sweep.epsilons: pressure needs at least two eps values");
    RunOutput out;
    out.report = base_report("pressure", ex);
    const auto sweep = epsilon_sweep(problem_of(ex), ex.epsilons);
    const auto& a = sweep[sweep.size() - 2];
    const auto& b = sweep.back();
    const double limit = richardson_linear(a.eps, a.lambda, b.eps, b.lambda);
    const RecurrentSet rs = classify_recurrent_set(ex.field, ex.grid, ex.section_axis, ex.n_sections);
    const PressurePrediction p = pressure_prediction(rs, ex.field, ex.c, limit);

    json cands = json::array();
    Csv csv({"element", "value", "reversed"});
    std::ostringstream summary;
    for (const auto& c : p.candidates) {
        cands.push_back({{"element", c.element}, {"value", c.value}, {"reversed", c.reversed}});
        csv.row(c.element, c.value, c.reversed);
        summary << c.element << "  " << format_number(c.value) << "  reversed " << format_number(c.reversed) << "\n";
    }
    json lams = json::array();
    for (const auto& r : sweep) lams.push_back({{"eps", r.eps}, {"lambda", r.lambda}});
    out.report["sweep"] = lams;
    out.report["candidates"] = cands;
    out.report["max"] = p.max;
    out.report["min"] = p.min;
    out.report["reversed_max"] = p.reversed_max;
    out.report["reversed_min"] = p.reversed_min;
    out.report["sweep_limit"] = limit;
    out.report["matched"] = p.matched;
    csv.row("sweep_limit", limit, limit);
    out.artifacts.push_back({"pressure.csv", csv.str()});
    summary << "sweep limit " << format_number(limit) << ", closer to the " << p.matched << " candidate\n";
    out.summary = summary.str();
    return out;
}

}  // namespace

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> s{"eigen", "concentrate", "transport", "nonlinear", "verify", "pressure"};
    return s;
}

RunOutput run_experiment(const std::string& subcommand, const ExperimentConfig& ex)
{
    if (subcommand == "eigen") return run_eigen(ex);
    if (subcommand == "concentrate") return run_concentrate(ex);
    if (subcommand == "transport") return run_transport(ex);
    if (subcommand == "nonlinear") return run_nonlinear(ex);
    if (subcommand == "verify") return run_verify(ex);
    if (subcommand == "pressure") return run_pressure(ex);
    throw PreconditionError("unknown subcommand '" + subcommand + "'");
}

void write_artifacts(const RunOutput& out, const std::string& subcommand, const ExperimentConfig& ex)
{
    namespace fs = std::filesystem;
    const fs::path dir(ex.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw PreconditionError("cannot create output directory '" + ex.out_dir + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw PreconditionError("cannot write '" + (dir / name).string() + "'");
        os << content;
    };
    if (ex.wants("csv"))
        for (const auto& a : out.artifacts) write(a.name, a.content);
    if (ex.wants("json")) write(subcommand + ".json", out.report.dump(2) + "\n");
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string field_csv(const ScalarSamples& s)
{
    std::string out = s.grid.dim() == 2 ? "x,y,value\r\n" : "x,value\r\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Point p = s.grid.coord(i);
        out += format_number(p[0]);
        if (s.grid.dim() == 2) out += "," + format_number(p[1]);
        out += "," + format_number(s[i]) + "\r\n";
    }
    return out;
}

int exit_code_for_current_exception()
{
    try {
        throw;
    } catch (const PreconditionError&) {
        return 2;
    } catch (const ConvergenceError&) {
        return 3;
    } catch (...) {
        return 1;
    }
}

}  // namespace vvlab
