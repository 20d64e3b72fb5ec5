#pragma once

// Analytic vector fields on S^1 / T^2, their flows, and the recurrent set of
// a Morse-Smale field: hyperbolic fixed points and periodic orbits.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vvlab/expr.hpp"
#include "vvlab/mesh.hpp"

namespace vvlab {

/// Closed-form vector field b(lambda, x), evaluable at any coordinate.
///
/// Every family is stored as component expressions, so Jacobians, the
/// divergence and the lambda-derivative come from symbolic differentiation.
class FieldSpec {
public:
    /// b == 0.
    static FieldSpec zero(int dim);
    /// b = -sin x on the circle.
    static FieldSpec circle_sine();
    /// b = -grad(cos x + cos y) = (sin x, sin y).
    static FieldSpec torus_morse();
    /// b = (1, -sin y): attracting cycle y = 0, repelling cycle y = pi.
    static FieldSpec torus_cycles();
    /// b = (1, -kappa sin y).
    static FieldSpec shifted_torus_cycles(double kappa);
    /// b = grad(phi).
    static FieldSpec gradient(const Expr& phi, int dim);
    /// User-supplied components; lambda-dependence makes takes_lambda() true.
    static FieldSpec expression(int dim, const Expr& bx, const Expr& by = Expr{});
    /// b = -grad(L) + omega.
    static FieldSpec lyapunov_shift(const FieldSpec& omega, const Expr& lyapunov);

    const std::string& family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    int dim() const { return dim_; }
    double period() const { return period_; }
    bool takes_lambda() const { return takes_lambda_; }
    const std::array<Expr, 2>& components() const { return comps_; }

    Point operator()(const Point& x, double lambda = 0.0) const;
    /// dim x dim Jacobian D_x b.
    Eigen::MatrixXd jacobian(const Point& x, double lambda = 0.0) const;
    Point d_lambda(const Point& x, double lambda = 0.0) const;
    double divergence(const Point& x, double lambda = 0.0) const;

    Point wrap(Point p) const;
    Point displacement(const Point& a, const Point& b) const;
    double distance(const Point& a, const Point& b) const;

private:
    FieldSpec(std::string family, std::vector<double> params, int dim, std::array<Expr, 2> comps);

    std::string family_;
    std::vector<double> params_;
    int dim_ = 1;
    double period_;
    bool takes_lambda_ = false;
    std::array<Expr, 2> comps_;
    std::array<CompiledExpr, 2> eval_;
    std::array<std::array<CompiledExpr, 2>, 2> jac_;
    std::array<CompiledExpr, 2> dlambda_;
};

/// Central-difference Jacobian, the fallback for fields without closed forms.
Eigen::MatrixXd jacobian_fd(const FieldSpec& spec, const Point& x, double lambda = 0.0, double step = 1e-5);

enum class Direction { Forward, Backward };

struct Trajectory {
    std::vector<double> times;
    std::vector<Point> points;  // wrapped into the fundamental domain
};

/// Field sampled on the grid nodes.
VectorSamples sample_field(const FieldSpec& spec, const PeriodicGrid& grid, double lambda = 0.0);

/// Classical RK4 step of xdot = sign * b(x) in unwrapped coordinates.
Point rk4_step(const FieldSpec& spec, const Point& x, double dt, double sign = 1.0, double lambda = 0.0);

Trajectory flow(const FieldSpec& spec, const Point& x0, double t_final, double dt, Direction direction,
                double lambda = 0.0);

enum class FixedPointKind { Sink, Source, Saddle, NonHyperbolic };
std::string to_string(FixedPointKind k);

struct FixedPoint {
    Point position{};
    Eigen::MatrixXd jacobian;
    std::vector<double> eigen_real_parts;
    FixedPointKind kind = FixedPointKind::NonHyperbolic;
    double residual = 0.0;  // |b(position)|

    bool hyperbolic() const { return kind != FixedPointKind::NonHyperbolic; }
    /// Smallest |Re eigenvalue|: the slowest linear rate.
    double slowest_rate() const;
    /// Sum of the positive real parts (trace on the unstable subspace).
    double unstable_trace() const;
};

constexpr double kHyperbolicityFloor = 1e-8;

/// Newton from every grid node where |b| is locally minimal, merged within one
/// grid spacing. Non-hyperbolic zeros are returned with kind NonHyperbolic.
std::vector<FixedPoint> find_fixed_points(const FieldSpec& spec, const PeriodicGrid& grid, double lambda = 0.0);

FixedPoint classify_fixed_point(const FieldSpec& spec, const Point& p, double lambda = 0.0);

struct PeriodicOrbit {
    std::vector<Point> samples;     // one period, forward-time order, wrapped
    std::vector<double> arclength;  // cumulative length at each sample, arclength[0] == 0
    double period = 0.0;
    double length = 0.0;
    double floquet_log = 0.0;  // log(nontrivial multiplier) / period
    double closure_gap = 0.0;
    double section_coordinate = 0.0;

    bool hyperbolic() const { return std::abs(floquet_log) >= kHyperbolicityFloor; }
    bool attracting() const { return floquet_log < 0.0; }
    /// Minimum-image distance from p to the sampled polyline.
    double distance_to(const FieldSpec& spec, const Point& p) const;
    /// Point and unit tangent at arclength l (periodic in the orbit length).
    std::pair<Point, Point> at_arclength(double l) const;

    /// Bounding circles over runs of consecutive samples, used to prune
    /// distance queries. Rebuilt whenever samples change.
    void build_blocks();
    std::vector<std::size_t> block_begin;
    std::vector<Point> block_center;
    std::vector<double> block_radius;
};

struct OrbitSearchOptions {
    double dt = 2e-3;
    double t_max = 200.0;
    double newton_tol = 1e-12;
    int max_newton = 50;
};

/// Periodic orbits crossing the coordinate section {x_axis = 0} once per
/// period, found through the first-return map in both time directions.
std::vector<PeriodicOrbit> find_periodic_orbits(const FieldSpec& spec, int section_axis, int n_sections,
                                                const OrbitSearchOptions& opts = {});

struct RecurrentSet {
    std::vector<FixedPoint> fixed_points;
    std::vector<PeriodicOrbit> orbits;
    bool morse_smale = false;
    std::vector<std::string> violations;

    /// Slowest contraction rate over all attractors (sinks, attracting cycles).
    double slowest_attraction() const;
    /// Distance from p to the nearest recurrent element.
    double distance_to(const FieldSpec& spec, const Point& p) const;
};

RecurrentSet classify_recurrent_set(const FieldSpec& spec, const PeriodicGrid& grid, int section_axis = 0,
                                    int n_sections = 64, const OrbitSearchOptions& opts = {});

/// sup over nodes (and lambda samples) of the largest eigenvalue of the
/// symmetrised Jacobian (Db + Db^T)/2.
double compute_b0(const FieldSpec& spec, const PeriodicGrid& grid, const std::vector<double>& lambda_samples = {});

/// Basin index per node (index into attractor list: sinks first, then
/// attracting orbits); -1 for nodes that reach no attractor.
std::vector<int> basin_labels(const FieldSpec& spec, const PeriodicGrid& grid, const RecurrentSet& rs,
                              double dt = 1e-2);

/// 1.0 on nodes within tube_radius of a basin boundary, an unlabeled node, a
/// source or saddle, or a repelling orbit; 0.0 elsewhere.
ScalarSamples separatrix_mask(const FieldSpec& spec, const PeriodicGrid& grid, const RecurrentSet& rs,
                              double tube_radius, double dt = 1e-2);

}  // namespace vvlab
