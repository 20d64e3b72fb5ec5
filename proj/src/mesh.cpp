#include "vvlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vvlab/error.hpp"

namespace vvlab {

PeriodicGrid::PeriodicGrid(int dim, std::array<int, 2> n, std::array<double, 2> period) : dim_(dim)
{
    require(dim == 1 || dim == 2, "grid dimension must be 1 or 2, got " + std::to_string(dim));
    for (int a = 0; a < dim; ++a) {
        require(n[a] >= kMinPoints,
                "grid needs at least " + std::to_string(kMinPoints) + " points per axis, got " + std::to_string(n[a]));
        require(period[a] > 0.0 && std::isfinite(period[a]), "grid period must be positive");
        n_[a] = n[a];
        period_[a] = period[a];
        h_[a] = period[a] / n[a];
    }
}

std::size_t PeriodicGrid::size() const
{
    return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
}

double PeriodicGrid::cell_volume() const
{
    return dim_ == 1 ? h_[0] : h_[0] * h_[1];
}

double PeriodicGrid::volume() const
{
    return dim_ == 1 ? period_[0] : period_[0] * period_[1];
}

std::size_t PeriodicGrid::index(int i, int j) const
{
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(j);
}

std::array<int, 2> PeriodicGrid::multi_index(std::size_t node) const
{
    return {static_cast<int>(node % n_[0]), static_cast<int>(node / n_[0])};
}

std::size_t PeriodicGrid::shifted(std::size_t node, int axis, int offset) const
{
    auto ij = multi_index(node);
    const int m = n_[axis];
    ij[axis] = ((ij[axis] + offset) % m + m) % m;
    return index(ij[0], ij[1]);
}

Point PeriodicGrid::coord(std::size_t node) const
{
    const auto ij = multi_index(node);
    return {ij[0] * h_[0], dim_ == 2 ? ij[1] * h_[1] : 0.0};
}

Point PeriodicGrid::wrap(Point p) const
{
    for (int a = 0; a < dim_; ++a) {
        p[a] = std::fmod(p[a], period_[a]);
        if (p[a] < 0.0) p[a] += period_[a];
        if (p[a] >= period_[a]) p[a] = 0.0;
    }
    if (dim_ == 1) p[1] = 0.0;
    return p;
}

Point PeriodicGrid::displacement(const Point& a, const Point& b) const
{
    Point d{0.0, 0.0};
    for (int k = 0; k < dim_; ++k) {
        double v = std::remainder(a[k] - b[k], period_[k]);
        d[k] = v;
    }
    return d;
}

double PeriodicGrid::distance(const Point& a, const Point& b) const
{
    const auto d = displacement(a, b);
    return std::hypot(d[0], d[1]);
}

PeriodicGrid build_grid(int dim, int n, double period)
{
    return PeriodicGrid(dim, {n, n}, {period, period});
}

ScalarSamples::ScalarSamples(const PeriodicGrid& g, double fill) : grid(g), values(g.size(), fill) {}

ScalarSamples::ScalarSamples(const PeriodicGrid& g, std::vector<double> v) : grid(g), values(std::move(v))
{
    require(values.size() == grid.size(), "sample count does not match grid node count");
}

VectorSamples::VectorSamples(const PeriodicGrid& g) : grid(g)
{
    components[0].assign(g.size(), 0.0);
    components[1].assign(g.size(), 0.0);
}

Point VectorSamples::at(std::size_t node) const
{
    return {components[0][node], components[1][node]};
}

ScalarSamples sample(const PeriodicGrid& grid, const std::function<double(const Point&)>& fn)
{
    ScalarSamples s(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) s[i] = fn(grid.coord(i));
    return s;
}

VectorSamples sample_vector(const PeriodicGrid& grid, const std::function<Point(const Point&)>& fn)
{
    VectorSamples v(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point p = fn(grid.coord(i));
        v.components[0][i] = p[0];
        v.components[1][i] = p[1];
    }
    return v;
}

double integrate(const ScalarSamples& s)
{
    double sum = 0.0;
    for (double v : s.values) sum += v;
    return sum * s.grid.cell_volume();
}

VectorSamples gradient_fd(const ScalarSamples& s)
{
    const auto& g = s.grid;
    VectorSamples grad(g);
    for (int a = 0; a < g.dim(); ++a) {
        const double inv = 1.0 / (12.0 * g.h(a));
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double fp1 = s[g.shifted(i, a, 1)];
            const double fp2 = s[g.shifted(i, a, 2)];
            const double fm1 = s[g.shifted(i, a, -1)];
            const double fm2 = s[g.shifted(i, a, -2)];
            grad.components[a][i] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) * inv;
        }
    }
    return grad;
}

double sup_norm(const ScalarSamples& s)
{
    double m = 0.0;
    for (double v : s.values) m = std::max(m, std::abs(v));
    return m;
}

namespace {

int wrap_index(int i, int n)
{
    return ((i % n) + n) % n;
}

// Position in units of grid spacing, split into base index and fraction.
void locate(const PeriodicGrid& g, int axis, double x, int& base, double& frac)
{
    const double u = x / g.h(axis);
    const double f = std::floor(u);
    base = static_cast<int>(f);
    frac = u - f;
}

double catmull_rom(double p0, double p1, double p2, double p3, double t)
{
    return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

}  // namespace

double interpolate_linear(const ScalarSamples& s, const Point& p)
{
    const auto& g = s.grid;
    int i0;
    double fx;
    locate(g, 0, p[0], i0, fx);
    const int nx = g.n(0);
    if (g.dim() == 1) {
        return (1.0 - fx) * s[wrap_index(i0, nx)] + fx * s[wrap_index(i0 + 1, nx)];
    }
    int j0;
    double fy;
    locate(g, 1, p[1], j0, fy);
    const int ny = g.n(1);
    const int ia = wrap_index(i0, nx), ib = wrap_index(i0 + 1, nx);
    const int ja = wrap_index(j0, ny), jb = wrap_index(j0 + 1, ny);
    return (1.0 - fx) * (1.0 - fy) * s[g.index(ia, ja)] + fx * (1.0 - fy) * s[g.index(ib, ja)] +
           (1.0 - fx) * fy * s[g.index(ia, jb)] + fx * fy * s[g.index(ib, jb)];
}

double interpolate_cubic(const ScalarSamples& s, const Point& p)
{
    const auto& g = s.grid;
    int i0;
    double fx;
    locate(g, 0, p[0], i0, fx);
    const int nx = g.n(0);
    auto row = [&](int j) {
        return catmull_rom(s[g.index(wrap_index(i0 - 1, nx), j)], s[g.index(wrap_index(i0, nx), j)],
                           s[g.index(wrap_index(i0 + 1, nx), j)], s[g.index(wrap_index(i0 + 2, nx), j)], fx);
    };
    if (g.dim() == 1) return row(0);
    int j0;
    double fy;
    locate(g, 1, p[1], j0, fy);
    const int ny = g.n(1);
    return catmull_rom(row(wrap_index(j0 - 1, ny)), row(wrap_index(j0, ny)), row(wrap_index(j0 + 1, ny)),
                       row(wrap_index(j0 + 2, ny)), fy);
}

}  // namespace vvlab
