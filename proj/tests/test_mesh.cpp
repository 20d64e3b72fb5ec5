#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vvlab/error.hpp"
#include "vvlab/mesh.hpp"

using namespace vvlab;
using std::numbers::pi;

TEST_CASE("grid construction")
{
    const PeriodicGrid c = build_grid(1, 64, 2 * pi);
    CHECK(c.size() == 64);
    CHECK(c.h(0) == doctest::Approx(2 * pi / 64));

    const PeriodicGrid t = build_grid(2, 64, 2 * pi);
    CHECK(t.size() == 4096);
    CHECK(t.cell_volume() == doctest::Approx(std::pow(2 * pi / 64, 2)));

    CHECK_THROWS_AS(build_grid(1, 8, 2 * pi), PreconditionError);
    CHECK_THROWS_AS(build_grid(3, 32, 2 * pi), PreconditionError);
    CHECK_THROWS_AS(build_grid(1, 32, -1.0), PreconditionError);
}

TEST_CASE("periodic indexing and distances")
{
    const PeriodicGrid t = build_grid(2, 32, 2 * pi);
    const std::size_t corner = t.index(0, 0);
    CHECK(t.shifted(corner, 0, -1) == t.index(31, 0));
    CHECK(t.shifted(corner, 1, -1) == t.index(0, 31));
    CHECK(t.multi_index(t.index(5, 7)) == std::array<int, 2>{5, 7});

    const Point w = t.wrap({-0.5, 2 * pi + 0.25});
    CHECK(w[0] == doctest::Approx(2 * pi - 0.5));
    CHECK(w[1] == doctest::Approx(0.25));
    CHECK(t.distance({0.1, 0.1}, {2 * pi - 0.1, 0.1}) == doctest::Approx(0.2));
}

TEST_CASE("integration")
{
    const PeriodicGrid c = build_grid(1, 64, 2 * pi);
    CHECK(integrate(ScalarSamples(c, 1.0)) == doctest::Approx(2 * pi));
    const double s2 = integrate(sample(c, [](const Point& p) { return std::sin(p[0]) * std::sin(p[0]); }));
    CHECK(std::abs(s2 - pi) <= 1e-10);
    const double cs = integrate(sample(c, [](const Point& p) { return std::cos(p[0]); }));
    CHECK(std::abs(cs) <= 1e-12);

    const PeriodicGrid t = build_grid(2, 32, 2 * pi);
    CHECK(integrate(ScalarSamples(t, 1.0)) == doctest::Approx(4 * pi * pi));
}

TEST_CASE("fourth-order gradient")
{
    auto err_at = [](int n) {
        const PeriodicGrid c = build_grid(1, n, 2 * pi);
        const VectorSamples g = gradient_fd(sample(c, [](const Point& p) { return std::cos(p[0]); }));
        double e = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) e = std::max(e, std::abs(g.components[0][i] + std::sin(c.coord(i)[0])));
        return e;
    };
    const double e32 = err_at(32), e64 = err_at(64);
    CHECK(e64 < 1e-5);
    CHECK(e32 / e64 == doctest::Approx(16.0).epsilon(0.05));

    const PeriodicGrid c = build_grid(1, 32, 2 * pi);
    const VectorSamples z = gradient_fd(ScalarSamples(c, 3.0));
    for (double v : z.components[0]) CHECK(std::abs(v) < 1e-14);

    const PeriodicGrid t = build_grid(2, 64, 2 * pi);
    const VectorSamples gy = gradient_fd(sample(t, [](const Point& p) { return std::sin(p[1]); }));
    double ex = 0.0, ey = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        ex = std::max(ex, std::abs(gy.components[0][i]));
        ey = std::max(ey, std::abs(gy.components[1][i] - std::cos(t.coord(i)[1])));
    }
    CHECK(ex < 1e-14);
    CHECK(ey < 1e-5);
}

TEST_CASE("interpolation")
{
    const PeriodicGrid t = build_grid(2, 64, 2 * pi);
    const ScalarSamples s = sample(t, [](const Point& p) { return std::sin(p[0]) * std::cos(p[1]); });
    for (const Point p : {Point{0.3, 1.7}, Point{6.2, 0.05}, Point{-0.4, 7.0}}) {
        const double exact = std::sin(p[0]) * std::cos(p[1]);
        CHECK(interpolate_cubic(s, p) == doctest::Approx(exact).epsilon(1e-3));
        CHECK(std::abs(interpolate_linear(s, p) - exact) < 5e-3);
    }
    // Nodes are reproduced exactly.
    CHECK(interpolate_cubic(s, t.coord(t.index(10, 20))) == doctest::Approx(s[t.index(10, 20)]));
}
