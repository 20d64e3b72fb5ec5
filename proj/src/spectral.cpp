#include "vvlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

#include "vvlab/error.hpp"

namespace vvlab {

std::string to_string(Scheme s)
{
    return s == Scheme::Central ? "central" : "exponential_fitted";
}

Scheme scheme_from_string(const std::string& s)
{
    if (s == "central") return Scheme::Central;
    if (s == "exponential_fitted" || s == "fitted" || s == "upwind") return Scheme::ExponentialFitted;
    throw PreconditionError("unknown scheme '" + s + "' (expected central or exponential_fitted)");
}

double bernoulli(double z)
{
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 - 0.5 * z + z2 / 12.0 - z2 * z2 / 720.0;
    }
    return z / std::expm1(z);
}

OperatorAssembly assemble(const PeriodicGrid& grid, double eps, const VectorSamples& b, const ScalarSamples& c,
                          Scheme scheme, bool allow_central)
{
    require(eps > 0.0 && std::isfinite(eps), "eps must be positive");
    require(b.grid == grid && c.grid == grid, "coefficient samples live on a different grid");
    const std::size_t N = grid.size();
    const int dim = grid.dim();

    if (scheme == Scheme::Central && !allow_central) {
        double pe = 0.0;
        for (int a = 0; a < dim; ++a)
            for (std::size_t i = 0; i < N; ++i) pe = std::max(pe, std::abs(b.components[a][i]) * grid.h(a) / (2.0 * eps));
        if (pe > 1.0) {
            std::ostringstream os;
            os << "central scheme loses monotonicity: cell Peclet number " << pe << " > 1 at eps=" << eps;
            throw PreconditionError(os.str());
        }
    }

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(N * (2 * dim + 1));
    for (std::size_t i = 0; i < N; ++i) {
        double diag = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double h = grid.h(a);
            const double k = eps / (h * h);
            const std::size_t ip = grid.shifted(i, a, 1), im = grid.shifted(i, a, -1);
            const auto& ba = b.components[a];
            double up, lo;
            if (scheme == Scheme::Central) {
                up = -k + ba[i] / (2.0 * h);
                lo = -k - ba[i] / (2.0 * h);
            } else {
                up = -k * bernoulli(0.5 * (ba[i] + ba[ip]) * h / eps);
                lo = -k * bernoulli(-0.5 * (ba[i] + ba[im]) * h / eps);
            }
            trips.emplace_back(i, ip, up);
            trips.emplace_back(i, im, lo);
            diag -= up + lo;
        }
        trips.emplace_back(i, i, diag);
    }

    OperatorAssembly op{grid, eps, scheme, SparseRowMatrix(N, N), SparseRowMatrix(N, N), c.values};
    op.transport.setFromTriplets(trips.begin(), trips.end());
    for (std::size_t i = 0; i < N; ++i) trips.emplace_back(i, i, c[i]);
    op.matrix.setFromTriplets(trips.begin(), trips.end());
    return op;
}

MMatrixCheck check_m_matrix(const OperatorAssembly& op)
{
    MMatrixCheck chk;
    chk.offdiag_nonpositive = true;
    for (Eigen::Index r = 0; r < op.transport.outerSize(); ++r) {
        double row = 0.0;
        for (SparseRowMatrix::InnerIterator it(op.transport, r); it; ++it) {
            row += it.value();
            if (it.col() != r && it.value() > 0.0) chk.offdiag_nonpositive = false;
        }
        chk.max_abs_row_sum = std::max(chk.max_abs_row_sum, std::abs(row));
    }
    return chk;
}

EigenResult principal_eigenpair(const OperatorAssembly& op, const EigenOptions& opts)
{
    const Eigen::Index N = op.matrix.rows();
    require(N > 0, "empty operator");

    // Gershgorin: every eigenvalue has real part >= min_i (a_ii - sum_j |a_ij|).
    double bound = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < N; ++r) {
        double d = 0.0, off = 0.0;
        for (SparseRowMatrix::InnerIterator it(op.matrix, r); it; ++it)
            (it.col() == r ? d : off) += it.col() == r ? it.value() : std::abs(it.value());
        bound = std::min(bound, d - off);
    }
    const double sigma = bound - 1.0;

    Eigen::SparseMatrix<double> A = opts.adjoint ? Eigen::SparseMatrix<double>(op.matrix.transpose())
                                                 : Eigen::SparseMatrix<double>(op.matrix);
    Eigen::SparseMatrix<double> S = A;
    for (Eigen::Index i = 0; i < N; ++i) S.coeffRef(i, i) -= sigma;
    S.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(S);
    if (lu.info() != Eigen::Success) throw ConvergenceError("sparse LU factorisation of the shifted operator failed");

    Eigen::VectorXd x(N);
    if (opts.initial && static_cast<Eigen::Index>(opts.initial->size()) == N)
        x = Eigen::Map<const Eigen::VectorXd>(opts.initial->data(), N).cwiseAbs();
    else
        x.setOnes();
    if (x.norm() == 0.0) x.setOnes();
    x.normalize();

    double lambda = x.dot(A * x), residual = std::numeric_limits<double>::infinity();
    int it = 0;
    bool converged = false;
    while (it < opts.max_iterations) {
        ++it;
        Eigen::VectorXd y = lu.solve(x);
        if (y.sum() < 0.0) y = -y;
        const double ny = y.norm();
        if (!(ny > 0.0) || !std::isfinite(ny)) throw ConvergenceError("inverse iteration produced a non-finite vector");
        x = y / ny;
        const Eigen::VectorXd Ax = A * x;
        const double next = x.dot(Ax);
        residual = (Ax - next * x).norm();
        const bool small_step = std::abs(next - lambda) <= opts.lambda_tol * std::max(1.0, std::abs(next));
        lambda = next;
        if (small_step && residual <= opts.residual_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "principal eigenpair did not converge in " << opts.max_iterations << " iterations (residual "
           << residual << ")";
        throw ConvergenceError(os.str());
    }

    const PeriodicGrid& g = op.grid;
    const double scale = 1.0 / std::sqrt(x.squaredNorm() * g.cell_volume());
    EigenResult res{op.eps, lambda, ScalarSamples(g), residual, it};
    for (Eigen::Index i = 0; i < N; ++i) {
        res.u[i] = x(i) * scale;
        if (res.u[i] < -1e-12) {
            std::ostringstream os;
            os << "principal eigenvector has a negative entry " << res.u[i] << " at node " << i
               << " (discrete operator is not monotone)";
            throw ConvergenceError(os.str());
        }
    }
    return res;
}

OperatorAssembly assemble_problem(const EigenProblem& problem, double eps)
{
    const VectorSamples b = sample_field(problem.b, problem.grid);
    const ScalarSamples c = sample(problem.grid, [&](const Point& x) { return problem.c(x); });
    return assemble(problem.grid, eps, b, c, problem.scheme, problem.allow_central);
}

std::vector<EigenResult> epsilon_sweep(const EigenProblem& problem, const std::vector<double>& eps_list)
{
    require(!eps_list.empty(), "epsilon sweep needs at least one value");
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        require(eps_list[k] > 0.0, "epsilon values must be positive");
        if (k > 0) require(eps_list[k] < eps_list[k - 1], "epsilon values must be strictly decreasing");
    }
    require(problem.grid.dim() == problem.b.dim(), "grid and field dimensions differ");

    const VectorSamples b = sample_field(problem.b, problem.grid);
    const ScalarSamples c = sample(problem.grid, [&](const Point& x) { return problem.c(x); });
    std::vector<EigenResult> out;
    std::vector<double> warm;
    for (double eps : eps_list) {
        auto tag = [eps](const std::exception& e) {
            std::ostringstream os;
            os << e.what() << " [eps=" << eps << "]";
            return os.str();
        };
        try {
            const OperatorAssembly op = assemble(problem.grid, eps, b, c, problem.scheme, problem.allow_central);
            EigenOptions opts;
            if (!warm.empty()) opts.initial = &warm;
            out.push_back(principal_eigenpair(op, opts));
            warm = out.back().u.values;
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(tag(e));
        } catch (const PreconditionError& e) {
            throw PreconditionError(tag(e));
        }
    }
    return out;
}

double rayleigh_quotient(const PeriodicGrid& grid, double eps, const ScalarSamples& a, const ScalarSamples& u)
{
    require(a.grid == grid && u.grid == grid, "samples live on a different grid");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (int ax = 0; ax < grid.dim(); ++ax) {
            const double d = (u[grid.shifted(i, ax, 1)] - u[i]) / grid.h(ax);
            num += eps * d * d;
        }
        num += a[i] * u[i] * u[i];
        den += u[i] * u[i];
    }
    require(den > 0.0, "Rayleigh quotient of the zero vector");
    return num / den;
}

ScalarSamples gradient_transform(const ScalarFunction& phi, double eps, const ScalarFunction& c,
                                 const PeriodicGrid& grid, std::vector<std::string>* warnings)
{
    require(eps > 0.0, "eps must be positive");
    ScalarSamples a(grid);
    ScalarSamples cs(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.coord(i);
        const Point g = phi.gradient(x);
        const double g2 = g[0] * g[0] + (grid.dim() == 2 ? g[1] * g[1] : 0.0);
        cs[i] = c(x);
        // Delta(phi) = -flat_laplacian(phi) with the positive Laplacian.
        a[i] = cs[i] * eps + 0.25 * g2 - 0.5 * eps * phi.flat_laplacian(x);
    }
    if (warnings) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            bool is_min = true;
            for (int ax = 0; ax < grid.dim() && is_min; ++ax)
                is_min = cs[i] <= cs[grid.shifted(i, ax, 1)] && cs[i] <= cs[grid.shifted(i, ax, -1)];
            if (!is_min) continue;
            const Point x = grid.coord(i);
            const double v = cs[i] - 0.5 * phi.flat_laplacian(x);
            if (v < 0.0) {
                std::ostringstream os;
                os << "c + Delta(phi)/2 = " << v << " < 0 at local minimum of c (" << x[0] << ", " << x[1] << ")";
                warnings->push_back(os.str());
            }
        }
    }
    return a;
}

OperatorAssembly transformed_assembly(const ScalarFunction& phi, double eps, const ScalarFunction& c,
                                      const PeriodicGrid& grid)
{
    ScalarSamples a = gradient_transform(phi, eps, c, grid);
    // Divided by eps so the spectrum sits at the scale of c and the fixed
    // shift of the inverse iteration still separates the eigenvalues.
    for (double& v : a.values) v /= eps;
    return assemble(grid, eps, VectorSamples(grid), a, Scheme::ExponentialFitted);
}

PressurePrediction pressure_prediction(const RecurrentSet& rs, const FieldSpec& field, const ScalarFunction& c,
                                       std::optional<double> sweep_limit)
{
    require(!rs.fixed_points.empty() || !rs.orbits.empty(), "pressure needs a non-empty recurrent set");
    PressurePrediction p;
    for (std::size_t k = 0; k < rs.fixed_points.size(); ++k) {
        const auto& fp = rs.fixed_points[k];
        require(fp.hyperbolic(), "pressure needs hyperbolic fixed points");
        std::ostringstream name;
        name << to_string(fp.kind) << "@(" << fp.position[0];
        if (field.dim() == 2) name << ", " << fp.position[1];
        name << ")";
        double stable = 0.0;
        for (double re : fp.eigen_real_parts)
            if (re < 0.0) stable -= re;
        p.candidates.push_back({name.str(), c(fp.position) - fp.unstable_trace(), c(fp.position) - stable});
    }
    for (std::size_t k = 0; k < rs.orbits.size(); ++k) {
        const auto& orb = rs.orbits[k];
        require(orb.hyperbolic(), "pressure needs hyperbolic periodic orbits");
        require(!orb.samples.empty(), "periodic orbit without samples");
        // Samples are equally spaced in time, so the mean is the time average.
        double mean = 0.0;
        for (const auto& x : orb.samples) mean += c(x);
        mean /= static_cast<double>(orb.samples.size());
        std::ostringstream name;
        name << (orb.attracting() ? "attracting" : "repelling") << "_orbit@" << orb.section_coordinate;
        p.candidates.push_back({name.str(), mean - std::max(orb.floquet_log, 0.0), mean - std::max(-orb.floquet_log, 0.0)});
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    p.max = p.reversed_max = -inf;
    p.min = p.reversed_min = inf;
    for (const auto& cand : p.candidates) {
        p.max = std::max(p.max, cand.value);
        p.min = std::min(p.min, cand.value);
        p.reversed_max = std::max(p.reversed_max, cand.reversed);
        p.reversed_min = std::min(p.reversed_min, cand.reversed);
    }
    p.sweep_limit = sweep_limit;
    if (sweep_limit) {
        const std::pair<const char*, double> options[] = {
            {"max", p.max}, {"min", p.min}, {"reversed_max", p.reversed_max}, {"reversed_min", p.reversed_min}};
        double best = inf;
        for (const auto& [label, v] : options)
            if (std::abs(*sweep_limit - v) < best) {
                best = std::abs(*sweep_limit - v);
                p.matched = label;
            }
    }
    return p;
}

}  // namespace vvlab
