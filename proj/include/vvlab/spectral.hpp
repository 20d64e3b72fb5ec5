#pragma once

// Discrete L_eps = eps*Delta + b.grad + c on a periodic grid, with
// Delta = -div grad (positive semidefinite), and its principal eigenpair.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "vvlab/dynsys.hpp"
#include "vvlab/expr.hpp"
#include "vvlab/mesh.hpp"

namespace vvlab {

enum class Scheme { Central, ExponentialFitted };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

/// Bernoulli function B(z) = z / (e^z - 1), B(0) = 1.
double bernoulli(double z);

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct OperatorAssembly {
    PeriodicGrid grid;
    double eps = 0.0;
    Scheme scheme = Scheme::ExponentialFitted;
    SparseRowMatrix transport;  // eps*Delta + b.grad, annihilates constants
    SparseRowMatrix matrix;     // transport + diag(c)
    std::vector<double> c;
};

/// Throws PreconditionError for eps <= 0, and for the central scheme when the
/// cell Peclet number max|b| h / (2 eps) exceeds 1 unless allow_central is set.
OperatorAssembly assemble(const PeriodicGrid& grid, double eps, const VectorSamples& b, const ScalarSamples& c,
                          Scheme scheme = Scheme::ExponentialFitted, bool allow_central = false);

struct MMatrixCheck {
    bool offdiag_nonpositive = false;
    double max_abs_row_sum = 0.0;  // of the transport part
    bool pass() const { return offdiag_nonpositive && max_abs_row_sum <= 1e-12; }
};
MMatrixCheck check_m_matrix(const OperatorAssembly& op);

struct EigenResult {
    double eps = 0.0;
    double lambda = 0.0;
    ScalarSamples u;  // positive, integral of u^2 equals 1
    double residual = 0.0;
    int iterations = 0;
};

struct EigenOptions {
    int max_iterations = 500;
    double lambda_tol = 1e-12;
    double residual_tol = 1e-9;
    bool adjoint = false;
    const std::vector<double>* initial = nullptr;
};

/// Shifted inverse power iteration with the shift below the Gershgorin bound
/// on the real parts; one sparse LU reused across iterations.
EigenResult principal_eigenpair(const OperatorAssembly& op, const EigenOptions& opts = {});

struct EigenProblem {
    PeriodicGrid grid;
    FieldSpec b;
    ScalarFunction c;
    Scheme scheme = Scheme::ExponentialFitted;
    bool allow_central = false;
};

/// Independent solves over a strictly decreasing eps list, warm-started from
/// the previous eigenvector. Failures are rethrown with the eps attached.
std::vector<EigenResult> epsilon_sweep(const EigenProblem& problem, const std::vector<double>& eps_list);

OperatorAssembly assemble_problem(const EigenProblem& problem, double eps);

/// Discrete eps * |grad u|^2 + a u^2 quotient (b = 0 operators), with the
/// forward-difference Dirichlet form matching the assembled Laplacian.
double rayleigh_quotient(const PeriodicGrid& grid, double eps, const ScalarSamples& a, const ScalarSamples& u);

/// a_eps = c*eps + |grad phi|^2 / 4 + eps * Delta(phi) / 2 for b = grad(phi).
/// Appends a warning for every local minimum of c where c + Delta(phi)/2 < 0.
ScalarSamples gradient_transform(const ScalarFunction& phi, double eps, const ScalarFunction& c,
                                 const PeriodicGrid& grid, std::vector<std::string>* warnings = nullptr);

/// (eps^2 * Delta + a_eps) / eps. The undivided operator has principal
/// eigenvalue eps * lambda_eps, so this one carries lambda_eps itself.
OperatorAssembly transformed_assembly(const ScalarFunction& phi, double eps, const ScalarFunction& c,
                                      const PeriodicGrid& grid);

struct PressureCandidate {
    std::string element;
    double value = 0.0;
    double reversed = 0.0;  // same quantity for the time-reversed flow
};

struct PressurePrediction {
    std::vector<PressureCandidate> candidates;
    double max = 0.0;
    double min = 0.0;
    double reversed_max = 0.0;
    double reversed_min = 0.0;
    std::optional<double> sweep_limit;
    // "max", "min", "reversed_max" or "reversed_min"; empty without a sweep limit
    std::string matched;
};

/// Zero-entropy pressure over the recurrent set: c(P) minus the unstable
/// trace at fixed points, and the period average of c minus the positive
/// part of the Floquet exponent on cycles. The reversed values swap the
/// stable and unstable directions.
PressurePrediction pressure_prediction(const RecurrentSet& rs, const FieldSpec& field, const ScalarFunction& c,
                                       std::optional<double> sweep_limit = std::nullopt);

}  // namespace vvlab
