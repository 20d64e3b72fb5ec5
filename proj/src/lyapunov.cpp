#include "vvlab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vvlab/error.hpp"

namespace vvlab {

ScalarSamples psi_field(const ScalarFunction& L, const FieldSpec& omega, const PeriodicGrid& grid)
{
    require(grid.dim() == omega.dim(), "grid and field dimensions differ");
    ScalarSamples psi(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.coord(i);
        const Point g = L.gradient(x);
        const Point w = omega(x);
        const double gx = g[0], gy = grid.dim() == 2 ? g[1] : 0.0;
        psi[i] = 0.25 * (gx * gx + gy * gy) + 0.5 * (gx * w[0] + gy * w[1]);
    }
    return psi;
}

ScalarSamples psi_field(const ScalarSamples& L, const FieldSpec& omega)
{
    const auto& grid = L.grid;
    require(grid.dim() == omega.dim(), "grid and field dimensions differ");
    const VectorSamples g = gradient_fd(L);
    ScalarSamples psi(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point gi = g.at(i);
        const Point w = omega(grid.coord(i));
        psi[i] = 0.25 * (gi[0] * gi[0] + gi[1] * gi[1]) + 0.5 * (gi[0] * w[0] + gi[1] * w[1]);
    }
    return psi;
}

LyapunovReport verify_lyapunov(const ScalarFunction& L, const FieldSpec& omega, const RecurrentSet& rs,
                               const PeriodicGrid& grid, const LyapunovOptions& opts)
{
    require(!rs.fixed_points.empty() || !rs.orbits.empty(), "Lyapunov verification needs a classified recurrent set");
    const ScalarSamples psi = psi_field(L, omega, grid);

    LyapunovReport rep;
    rep.tol = opts.tol;
    rep.delta = opts.delta > 0.0 ? opts.delta : 3.0 * grid.h(0);

    std::vector<double> dist(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) dist[i] = rs.distance_to(omega, grid.coord(i));

    rep.min_value = *std::min_element(psi.values.begin(), psi.values.end());
    rep.nonnegative = rep.min_value >= -opts.tol;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (psi[i] <= rep.min_value + opts.tol) rep.min_locations.push_back(grid.coord(i));
        if (psi[i] < -opts.tol) rep.offending_nodes.push_back(i);
    }

    // Each recurrent element must carry a near-zero value of Psi within delta.
    rep.minimum_on_recurrent = true;
    auto element_min = [&](auto&& distance_fn) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (distance_fn(grid.coord(i)) <= rep.delta) m = std::min(m, psi[i]);
        return m;
    };
    for (const auto& fp : rs.fixed_points) {
        const double m = element_min([&](const Point& x) { return omega.distance(fp.position, x); });
        if (!(m <= opts.tol)) rep.minimum_on_recurrent = false;
    }
    for (const auto& orb : rs.orbits) {
        const double m = element_min([&](const Point& x) { return orb.distance_to(omega, x); });
        if (!(m <= opts.tol)) rep.minimum_on_recurrent = false;
    }

    rep.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (dist[i] <= 2.0 * rep.delta) continue;
        rep.margin = std::min(rep.margin, psi[i]);
        if (psi[i] <= opts.tol && psi[i] >= -opts.tol) rep.offending_nodes.push_back(i);
    }
    rep.positive_off_recurrent = rep.margin > opts.tol;
    std::sort(rep.offending_nodes.begin(), rep.offending_nodes.end());
    rep.offending_nodes.erase(std::unique(rep.offending_nodes.begin(), rep.offending_nodes.end()), rep.offending_nodes.end());
    return rep;
}

LyapunovSpec make_lyapunov_spec(const ScalarFunction& L, const FieldSpec& omega, const RecurrentSet& rs,
                                const PeriodicGrid& grid, const LyapunovOptions& opts)
{
    return {L, psi_field(L, omega, grid), verify_lyapunov(L, omega, rs, grid, opts)};
}

Eigen::MatrixXd solve_lyapunov_equation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& rhs)
{
    const Eigen::Index n = A.rows();
    // vec(A^T X + X A) = (I (x) A^T + A^T (x) I) vec(X), column-major vec.
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    const Eigen::MatrixXd At = A.transpose();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k) {
                K(i + j * n, k + j * n) += At(i, k);  // (I (x) A^T)
                K(i + j * n, i + k * n) += A(k, j);   // (A^T (x) I)
            }
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n * n);
    const Eigen::VectorXd x = K.fullPivLu().solve(b);
    Eigen::MatrixXd X = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
    return 0.5 * (X + X.transpose());
}

double LocalLyapunov::operator()(const Point& x, const FieldSpec& spec) const
{
    const Point d = spec.displacement(x, center);
    Eigen::VectorXd v(M.rows());
    for (Eigen::Index k = 0; k < M.rows(); ++k) v(k) = d[k];
    return v.dot(M * v);
}

LocalLyapunov quadratic_local_lyapunov(const FixedPoint& fp)
{
    const Eigen::MatrixXd& A = fp.jacobian;
    const Eigen::Index n = A.rows();
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
    int neg = 0, pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = es.eigenvalues()[i].real();
        if (std::abs(re) < kHyperbolicityFloor)
            throw PreconditionError("local Lyapunov function needs a hyperbolic fixed point");
        (re < 0.0 ? neg : pos)++;
    }

    LocalLyapunov out;
    out.center = fp.position;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    if (pos == 0 || neg == 0) {
        out.signature = pos == 0 ? Eigen::MatrixXd(-I) : I;
        out.M = solve_lyapunov_equation(A, out.signature);
        return out;
    }

    // Mixed signs only occur for real eigenvalues here (dim <= 2): split the
    // space along the stable and unstable eigenvectors and solve per block.
    Eigen::MatrixXd T(n, n);
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        T.col(i) = es.eigenvectors().col(i).real();
        s(i) = es.eigenvalues()[i].real() < 0.0 ? -1.0 : 1.0;
    }
    const Eigen::MatrixXd Tinv = T.inverse();
    const Eigen::MatrixXd B = Tinv * A * T;  // diagonal up to round-off
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) X(i, i) = s(i) / (2.0 * B(i, i));
    out.M = Tinv.transpose() * X * Tinv;
    out.M = 0.5 * (out.M + out.M.transpose());
    out.signature = Tinv.transpose() * s.asDiagonal() * Tinv;
    return out;
}

}  // namespace vvlab
