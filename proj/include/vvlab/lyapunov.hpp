#pragma once

// Lyapunov functions L for a non-gradient field Omega, the effective potential
//   Psi(L) = |grad L|^2 / 4 + <grad L, Omega> / 2,
// their verification on a grid, and quadratic local Lyapunov functions at
// hyperbolic fixed points.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vvlab/dynsys.hpp"
#include "vvlab/expr.hpp"
#include "vvlab/mesh.hpp"

namespace vvlab {

ScalarSamples psi_field(const ScalarFunction& L, const FieldSpec& omega, const PeriodicGrid& grid);
/// Same potential with grad L taken from fourth-order differences of samples.
ScalarSamples psi_field(const ScalarSamples& L, const FieldSpec& omega);

struct LyapunovOptions {
    double tol = 1e-8;
    /// Neighbourhood radius around the recurrent set; <= 0 means three grid spacings.
    double delta = 0.0;
};

struct LyapunovReport {
    bool nonnegative = false;          // Psi >= -tol on every node
    bool minimum_on_recurrent = false;  // each recurrent element has a node with Psi <= tol within delta
    bool positive_off_recurrent = false;  // Psi >= margin > tol outside the 2*delta neighbourhood
    double delta = 0.0;
    double tol = 0.0;
    double min_value = 0.0;
    double margin = 0.0;
    std::vector<Point> min_locations;
    std::vector<std::size_t> offending_nodes;

    bool pass() const { return nonnegative && minimum_on_recurrent && positive_off_recurrent; }
};

LyapunovReport verify_lyapunov(const ScalarFunction& L, const FieldSpec& omega, const RecurrentSet& rs,
                               const PeriodicGrid& grid, const LyapunovOptions& opts = {});

/// Closed-form global L together with its sampled potential and verdicts.
struct LyapunovSpec {
    ScalarFunction L;
    ScalarSamples psi;
    LyapunovReport report;
};

LyapunovSpec make_lyapunov_spec(const ScalarFunction& L, const FieldSpec& omega, const RecurrentSet& rs,
                                const PeriodicGrid& grid, const LyapunovOptions& opts = {});

/// L_loc(x) = (x - P)^T M (x - P) with A^T M + M A = signature.
///
/// On the stable subspace the block equation is solved with right-hand side
/// -I and on the unstable one with +I, so L_loc decreases along stable
/// directions and increases along unstable ones. For a sink signature == -I.
struct LocalLyapunov {
    Point center{};
    Eigen::MatrixXd M;
    Eigen::MatrixXd signature;

    double operator()(const Point& x, const FieldSpec& spec) const;
};

LocalLyapunov quadratic_local_lyapunov(const FixedPoint& fp);

/// Solve A^T X + X A = rhs by the dim^2 Kronecker system.
Eigen::MatrixXd solve_lyapunov_equation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& rhs);

}  // namespace vvlab
