#pragma once

// Bounded solutions of <b, grad u> + c u = f by characteristics, their viscous
// approximations, and the nonlinear variant with b(u, x), c(u, x).

#include <functional>
#include <string>
#include <vector>

#include "vvlab/dynsys.hpp"
#include "vvlab/expr.hpp"
#include "vvlab/mesh.hpp"

namespace vvlab {

using PointFn = std::function<double(const Point&)>;
using FieldFn = std::function<Point(const Point&)>;

struct TransportOptions {
    double dt = 2e-3 * 3.141592653589793;  // 1e-3 of the period
    double tail_tol = 1e-10;
    double tube_radius = 0.1;  // separatrix mask half-width
    double mask_dt = 1e-2;
};

struct TransportSolution {
    ScalarSamples u;
    ScalarSamples residual;  // |<b, grad u> + c u - f| with fourth-order differences
    ScalarSamples mask;      // 1 near separatrices, 0 elsewhere
    double grad_max = 0.0;
    double residual_off_mask = 0.0;
    double c0 = 0.0;
    double b0 = 0.0;
    double horizon = 0.0;
    std::vector<std::string> warnings;

    explicit TransportSolution(const PeriodicGrid& g) : u(g), residual(g), mask(g) {}
};

/// Discounted integral of f along the flow of -b from x up to time T:
/// int_0^T f(chi_t x) exp(-int_0^t c(chi_s x) ds) dt, by RK4 on the
/// augmented state (x, E, I) with E' = c and I' = f exp(-E).
double characteristic_integral(const FieldFn& b, const PointFn& c, const PointFn& f, const Point& x, double T,
                               double dt);

/// Same integral recorded at every time in `times` (sorted ascending) in a single pass.
std::vector<double> characteristic_partial_integrals(const FieldFn& b, const PointFn& c, const PointFn& f,
                                                     const Point& x, const std::vector<double>& times, double dt);

/// Endpoint chi_tau(x) and discount exp(-int_0^tau c) of one characteristic.
std::pair<Point, double> characteristic_endpoint(const FieldFn& b, const PointFn& c, const Point& x, double tau,
                                                 double dt);

/// Requires inf c > 0; horizon T = ln(1/tail_tol) / inf c. Warns when
/// inf c - b0 <= 0 (no gradient bound).
TransportSolution solve_linear(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                               const PeriodicGrid& grid, const TransportOptions& opts = {});

/// Characteristics solve for node-wise callables; the mask is left empty
/// (all zeros) and b0 is not computed.
TransportSolution solve_linear_fn(const FieldFn& b, const PointFn& c, const PointFn& f, const PeriodicGrid& grid,
                                  const TransportOptions& opts = {});

/// Direct solve of (eps Delta + b.grad + c) u = f with the fitted scheme.
ScalarSamples viscous_solve(double eps, const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                            const PeriodicGrid& grid);

/// Largest |a - b| over nodes where mask == 0.
double sup_distance_off_mask(const ScalarSamples& a, const ScalarSamples& b, const ScalarSamples& mask);

struct OscillationResult {
    std::vector<double> times;
    std::vector<double> partial;  // u_T(x) for each T
    double window = 0.0;
    double osc = 0.0;  // max - min of u_T over T in [T_last - window, T_last]
};

OscillationResult oscillation_indicator(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                                        const Point& x, const std::vector<double>& times, double window,
                                        double dt = 1e-3);

struct HyperbolicityConstants {
    double b0 = 0.0;
    double gamma = 0.0;
    double a0 = 0.0;
    double A = 0.0;
    double beta = 0.0;
    double Lambda = 0.0;
    // Ingredients, reported alongside.
    double inf_c = 0.0;
    double sup_grad_f = 0.0;
    double sup_f_over_c = 0.0;
    double sup_dc_dx = 0.0;
    double sup_dc_dlambda = 0.0;
    double sup_f_dc_dlambda = 0.0;  // sup f |c'|, for c0 (c0 - b0) > sup f |c'|
};

/// Sup/inf sweeps over the grid nodes and n_lambda equally spaced samples of
/// [lambda_lo, lambda_hi] (n_lambda >= 64).
HyperbolicityConstants hyperbolicity_constants(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                                               const PeriodicGrid& grid, double lambda_lo, double lambda_hi,
                                               int n_lambda = 129);

struct ConditionVerdict {
    bool cond1 = false;  // a0 > beta
    bool cond2 = false;  // a0^2 + beta^2 >= 2 a0 beta + 4 gamma sup|grad f|
    bool cond3 = false;  // Lambda^2 - 4 A gamma >= 0
    bool c0_large = false;  // inf c (inf c - b0) > sup f |c'|
    bool all() const { return cond1 && cond2 && cond3; }
};

ConditionVerdict check_conditions(const HyperbolicityConstants& k);

struct NonlinearOptions {
    double tol = 1e-9;
    int max_iterations = 50;
    double dt = 1e-2;
    double tail_tol = 1e-8;
    // Called after every iterate; a non-empty return aborts with ConvergenceError.
    std::function<std::string(const ScalarSamples&)> monitor;
};

struct NonlinearResult {
    TransportSolution solution;
    std::vector<double> history;  // ||u_{k+1} - u_k||_inf per iteration
    double contraction_ratio = 0.0;
    int iterations = 0;
    bool flagged = false;  // conditions 1-3 not all satisfied
    ConditionVerdict conditions;

    explicit NonlinearResult(const PeriodicGrid& g) : solution(g) {}
};

/// Picard iteration u_{k+1} = linear characteristics solve with b(u_k, .),
/// c(u_k, .). Throws ConvergenceError on divergence (||u||_inf beyond
/// 10 sup f / inf c) or after max_iterations.
NonlinearResult solve_nonlinear(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                                const ScalarSamples& u0, double lambda_lo, double lambda_hi,
                                const NonlinearOptions& opts = {});

struct BranchRoot {
    double value = 0.0;
    double derivative = 0.0;
    bool degenerate = false;
};

struct FixedPointBranches {
    Point position{};
    std::vector<BranchRoot> roots;
    int k = 0;  // simple roots
};

struct BranchTable {
    std::vector<FixedPointBranches> points;
    long long total = 0;  // product of k_i
};

/// Roots of g(u) = c(u, P) u - f(P) in [lambda_lo, lambda_hi] from a
/// 1024-cell sign scan and bisection.
BranchTable count_branches(const ScalarFunction& c, const ScalarFunction& f, const std::vector<Point>& fixed_points,
                           double lambda_lo, double lambda_hi);

struct BranchSeed {
    std::vector<int> choice;  // root index per fixed point
    bool converged = false;
    std::string status;
    double contraction_ratio = 0.0;
    int iterations = 0;
    int solution_index = -1;  // into BranchEnumeration::solutions
};

struct BranchEnumeration {
    long long combinatorial = 0;
    std::vector<BranchSeed> seeds;
    std::vector<ScalarSamples> solutions;  // distinct converged solutions
    double min_pairwise_distance = 0.0;
    double max_pairwise_distance = 0.0;
};

/// Seeds u0 = sum_i w_i(x) r_i with Gaussian partition-of-unity weights
/// around the fixed points, one seed per combination of simple roots.
BranchEnumeration enumerate_branches(const FieldSpec& b, const ScalarFunction& c, const ScalarFunction& f,
                                     const PeriodicGrid& grid, const BranchTable& table, double lambda_lo,
                                     double lambda_hi, const NonlinearOptions& opts = {});

}  // namespace vvlab
