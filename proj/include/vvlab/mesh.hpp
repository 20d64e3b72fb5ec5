#pragma once

// Uniform fully periodic grids on the circle and the flat two-torus, with the
// quadrature and finite-difference calculus every other module builds on.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace vvlab {

/// Coordinates on S^1 or T^2. In one dimension the second entry is unused.
using Point = std::array<double, 2>;

class PeriodicGrid {
public:
    static constexpr int kMinPoints = 16;

    /// Throws PreconditionError for dim outside {1,2}, n < 16 or period <= 0.
    PeriodicGrid(int dim, std::array<int, 2> n, std::array<double, 2> period);

    int dim() const { return dim_; }
    int n(int axis) const { return n_[axis]; }
    double period(int axis) const { return period_[axis]; }
    double h(int axis) const { return h_[axis]; }
    std::size_t size() const;

    /// Volume element of one node (product of spacings).
    double cell_volume() const;
    /// Flat volume of the whole domain (product of periods).
    double volume() const;

    std::size_t index(int i, int j = 0) const;
    /// Periodic neighbour index along `axis` with signed offset.
    std::size_t shifted(std::size_t node, int axis, int offset) const;
    std::array<int, 2> multi_index(std::size_t node) const;
    Point coord(std::size_t node) const;

    /// Wrap a coordinate into [0, period) on every active axis.
    Point wrap(Point p) const;
    /// Minimum-image displacement a - b per axis.
    Point displacement(const Point& a, const Point& b) const;
    double distance(const Point& a, const Point& b) const;

    bool operator==(const PeriodicGrid& o) const = default;

private:
    int dim_;
    std::array<int, 2> n_{1, 1};
    std::array<double, 2> period_{1.0, 1.0};
    std::array<double, 2> h_{1.0, 1.0};
};

PeriodicGrid build_grid(int dim, int n, double period);

struct ScalarSamples {
    PeriodicGrid grid;
    std::vector<double> values;

    explicit ScalarSamples(const PeriodicGrid& g, double fill = 0.0);
    ScalarSamples(const PeriodicGrid& g, std::vector<double> v);

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

struct VectorSamples {
    PeriodicGrid grid;
    std::array<std::vector<double>, 2> components;

    explicit VectorSamples(const PeriodicGrid& g);
    Point at(std::size_t node) const;
};

ScalarSamples sample(const PeriodicGrid& grid, const std::function<double(const Point&)>& fn);
VectorSamples sample_vector(const PeriodicGrid& grid, const std::function<Point(const Point&)>& fn);

/// Periodic rectangle rule: sum(values) * cell volume.
double integrate(const ScalarSamples& s);

/// Fourth-order central differences with periodic wrap.
VectorSamples gradient_fd(const ScalarSamples& s);

double sup_norm(const ScalarSamples& s);

/// Bilinear (linear in 1-D) periodic interpolation at an arbitrary point.
double interpolate_linear(const ScalarSamples& s, const Point& p);
/// Periodic cubic-convolution (Catmull-Rom) interpolation, tensor product in 2-D.
double interpolate_cubic(const ScalarSamples& s, const Point& p);

}  // namespace vvlab
