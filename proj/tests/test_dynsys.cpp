#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vvlab/dynsys.hpp"
#include "vvlab/error.hpp"

using namespace vvlab;
using std::numbers::pi;

namespace {

const FixedPoint* near(const std::vector<FixedPoint>& fps, const FieldSpec& b, Point p)
{
    for (const auto& fp : fps)
        if (b.distance(fp.position, p) < 1e-6) return &fp;
    return nullptr;
}

}  // namespace

TEST_CASE("field families")
{
    const FieldSpec s = FieldSpec::circle_sine();
    CHECK(s.dim() == 1);
    CHECK(s({1.0, 0})[0] == doctest::Approx(-std::sin(1.0)));
    CHECK(s.jacobian({0.0, 0})(0, 0) == doctest::Approx(-1.0));

    const FieldSpec m = FieldSpec::torus_morse();
    const Point v = m({0.3, 1.2});
    CHECK(v[0] == doctest::Approx(std::sin(0.3)));
    CHECK(v[1] == doctest::Approx(std::sin(1.2)));
    CHECK(m.divergence({0.3, 1.2}) == doctest::Approx(std::cos(0.3) + std::cos(1.2)));

    const FieldSpec shifted = FieldSpec::lyapunov_shift(FieldSpec::torus_cycles(), Expr::parse("4*(1 - cos(y))"));
    const Point w = shifted({0.0, 1.0});
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(-5 * std::sin(1.0)));

    const FieldSpec lam = FieldSpec::expression(1, Expr::parse("-(0.5 + 0.05*sin(lambda))*sin(x)"));
    CHECK(lam.takes_lambda());
    CHECK(lam.d_lambda({pi / 2, 0}, 0.0)[0] == doctest::Approx(-0.05));

    const Eigen::MatrixXd fd = jacobian_fd(shifted, {0.7, 0.4});
    CHECK((fd - shifted.jacobian({0.7, 0.4})).norm() < 1e-8);
}

TEST_CASE("flows")
{
    const FieldSpec s = FieldSpec::circle_sine();
    const Trajectory fixed = flow(s, {pi, 0}, 10.0, 1e-2, Direction::Forward);
    for (const auto& p : fixed.points) CHECK(std::abs(p[0] - pi) < 1e-12);

    const Trajectory cyc = flow(FieldSpec::torus_cycles(), {0.0, 0.1}, 50.0, 1e-2, Direction::Forward);
    CHECK(std::abs(std::remainder(cyc.points.back()[1], 2 * pi)) < 1e-4);

    const Trajectory back = flow(s, {0.1, 0}, 20.0, 1e-2, Direction::Backward);
    CHECK(back.points.back()[0] == doctest::Approx(pi).epsilon(1e-4));
}

TEST_CASE("fixed points")
{
    const PeriodicGrid t = build_grid(2, 64, 2 * pi);
    const FieldSpec m = FieldSpec::torus_morse();
    const auto fps = find_fixed_points(m, t);
    REQUIRE(fps.size() == 4);
    CHECK(near(fps, m, {0, 0})->kind == FixedPointKind::Source);
    CHECK(near(fps, m, {0, pi})->kind == FixedPointKind::Saddle);
    CHECK(near(fps, m, {pi, 0})->kind == FixedPointKind::Saddle);
    CHECK(near(fps, m, {pi, pi})->kind == FixedPointKind::Sink);
    CHECK(near(fps, m, {0, 0})->unstable_trace() == doctest::Approx(2.0));
    CHECK(near(fps, m, {0, pi})->unstable_trace() == doctest::Approx(1.0));

    CHECK(find_fixed_points(FieldSpec::torus_cycles(), t).empty());

    const PeriodicGrid c = build_grid(1, 64, 2 * pi);
    const FieldSpec s = FieldSpec::circle_sine();
    const auto cf = find_fixed_points(s, c);
    REQUIRE(cf.size() == 2);
    CHECK(near(cf, s, {0, 0})->kind == FixedPointKind::Sink);
    CHECK(near(cf, s, {pi, 0})->kind == FixedPointKind::Source);
    CHECK(near(cf, s, {0, 0})->slowest_rate() == doctest::Approx(1.0));

    // x^3 has a non-hyperbolic zero.
    const FieldSpec cubic = FieldSpec::expression(1, Expr::parse("sin(x)^3"));
    const FixedPoint z = classify_fixed_point(cubic, {0, 0});
    CHECK(z.kind == FixedPointKind::NonHyperbolic);
}

TEST_CASE("periodic orbits")
{
    const auto orbits = find_periodic_orbits(FieldSpec::torus_cycles(), 0, 32);
    REQUIRE(orbits.size() == 2);
    const auto& a = orbits[0].attracting() ? orbits[0] : orbits[1];
    const auto& r = orbits[0].attracting() ? orbits[1] : orbits[0];
    CHECK(a.floquet_log == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(r.floquet_log == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(a.section_coordinate) < 1e-8);
    CHECK(r.section_coordinate == doctest::Approx(pi));
    for (const auto* o : {&a, &r}) {
        CHECK(o->period == doctest::Approx(2 * pi).epsilon(1e-8));
        CHECK(o->length == doctest::Approx(2 * pi).epsilon(1e-6));
    }
    CHECK(a.distance_to(FieldSpec::torus_cycles(), {1.0, 0.25}) == doctest::Approx(0.25).epsilon(1e-6));

    const auto k5 = find_periodic_orbits(FieldSpec::shifted_torus_cycles(5.0), 0, 32);
    REQUIRE(k5.size() == 2);
    for (const auto& o : k5) CHECK(std::abs(o.floquet_log) == doctest::Approx(5.0).epsilon(1e-6));

    CHECK(find_periodic_orbits(FieldSpec::torus_morse(), 0, 32).empty());
}

TEST_CASE("recurrent set and b0")
{
    const PeriodicGrid t = build_grid(2, 64, 2 * pi);
    const RecurrentSet cyc = classify_recurrent_set(FieldSpec::torus_cycles(), t, 0, 32);
    CHECK(cyc.morse_smale);
    CHECK(cyc.orbits.size() == 2);
    CHECK(cyc.slowest_attraction() == doctest::Approx(1.0).epsilon(1e-6));

    const PeriodicGrid c = build_grid(1, 64, 2 * pi);
    CHECK(compute_b0(FieldSpec::circle_sine(), c) == doctest::Approx(1.0));
    CHECK(compute_b0(FieldSpec::torus_cycles(), t) == doctest::Approx(1.0));
    CHECK(compute_b0(FieldSpec::expression(2, Expr::parse("0.3"), Expr::parse("-1")), t) == doctest::Approx(0.0));
}

TEST_CASE("separatrix mask")
{
    const PeriodicGrid c = build_grid(1, 128, 2 * pi);
    const FieldSpec s = FieldSpec::circle_sine();
    const RecurrentSet rs = classify_recurrent_set(s, c);
    const ScalarSamples mask = separatrix_mask(s, c, rs, 0.1);
    CHECK(mask[c.index(64)] == 1.0);  // x = pi
    CHECK(mask[c.index(0)] == 0.0);
    CHECK(mask[c.index(32)] == 0.0);

    const PeriodicGrid t = build_grid(2, 64, 2 * pi);
    const FieldSpec m = FieldSpec::torus_morse();
    const RecurrentSet mrs = classify_recurrent_set(m, t);
    const ScalarSamples tm = separatrix_mask(m, t, mrs, 0.1);
    CHECK(tm[t.index(0, 16)] == 1.0);  // x = 0 line: stable manifold of a saddle
    CHECK(tm[t.index(16, 0)] == 1.0);
    CHECK(tm[t.index(32, 32)] == 0.0);  // the sink
    CHECK(tm[t.index(20, 40)] == 0.0);

    const auto labels = basin_labels(m, t, mrs);
    CHECK(labels[t.index(20, 40)] == labels[t.index(40, 20)]);
}
