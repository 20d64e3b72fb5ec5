#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vvlab/concentration.hpp"
#include "vvlab/error.hpp"

using namespace vvlab;
using std::numbers::pi;

namespace {

EigenResult constant_eigen(const PeriodicGrid& g, double eps)
{
    EigenResult r{eps, 1.0, ScalarSamples(g, 1.0)};
    return r;
}

}  // namespace

TEST_CASE("uniform measure")
{
    const PeriodicGrid t = build_grid(2, 128, 2 * pi);
    const Measure m = weighted_measure(constant_eigen(t, 1.0), WeightKind::None);
    CHECK(integrate(m.density) == doctest::Approx(1.0));
    for (double v : m.density.values) CHECK(v == doctest::Approx(1.0 / (4 * pi * pi)));

    const double delta = 0.5;
    CHECK(ball_mass(m, {1.0, 2.0}, delta) == doctest::Approx(pi * delta * delta / (4 * pi * pi)).epsilon(0.05));
    CHECK_THROWS_AS(ball_mass(m, {1.0, 2.0}, t.h(0)), PreconditionError);
}

TEST_CASE("weighting and underflow")
{
    const PeriodicGrid c = build_grid(1, 64, 2 * pi);
    const ScalarFunction W = ScalarFunction::parse("cos(x)");
    const Measure m = weighted_measure(constant_eigen(c, 0.1), WeightKind::Potential, W);
    // Density ratio between two nodes is exp(-(W1 - W2)/eps).
    const double r = m.density[c.index(0)] / m.density[c.index(32)];
    CHECK(r == doctest::Approx(std::exp(-2.0 / 0.1)));

    EigenResult spike = constant_eigen(c, 0.1);
    for (auto& v : spike.u.values) v = 0.0;
    CHECK_THROWS_AS(weighted_measure(spike, WeightKind::None), PreconditionError);
}

TEST_CASE("symmetric double well splits the mass")
{
    const PeriodicGrid c = build_grid(1, 256, 2 * pi);
    const EigenProblem p{c, FieldSpec::zero(1), ScalarFunction::parse("2 + cos(2*x)")};
    const auto sweep = epsilon_sweep(p, {0.05, 0.005});
    const ConcentrationTargets tg = targets_from_minima(sample(c, [](const Point& x) { return 2 + std::cos(2 * x[0]); }));
    REQUIRE(tg.centers.size() == 2);
    ConcentrationOptions o;
    o.delta = 0.5;
    const ConcentrationReport rep = concentration_report(sweep, WeightKind::None, {}, tg, p.b, o);
    const auto& last = rep.entries.back();
    CHECK(last.ball_masses[0] == doctest::Approx(0.5).epsilon(0.02));
    CHECK(last.ball_masses[1] == doctest::Approx(0.5).epsilon(0.02));
    CHECK(last.residual_mass < rep.entries.front().residual_mass);

    const SimplexVerdict v = simplex_check(rep);
    CHECK(v.bookkeeping);
    CHECK(v.max_bookkeeping_error <= 1e-8);
    CHECK(v.pass());

    ConcentrationOptions overlap;
    overlap.delta = 1.7;
    CHECK_THROWS_AS(concentration_report(sweep, WeightKind::None, {}, tg, p.b, overlap), PreconditionError);
}

TEST_CASE("cycle densities")
{
    const PeriodicGrid t = build_grid(2, 64, 2 * pi);
    const FieldSpec omega = FieldSpec::torus_cycles();
    const auto orbits = find_periodic_orbits(omega, 0, 32);
    REQUIRE(orbits.size() == 2);
    const auto& y0 = orbits[0].attracting() ? orbits[0] : orbits[1];
    const auto& ypi = orbits[0].attracting() ? orbits[1] : orbits[0];

    // exp(-L/eps) with a constant eigenfunction: translation invariant in x.
    const ScalarFunction L = ScalarFunction::parse("4*(1 - cos(y))");
    const Measure m = weighted_measure(constant_eigen(t, 0.1), WeightKind::Lyapunov, L);
    const CycleDensity d = cycle_density(m, y0, omega, 16, 0.3, {ypi});
    REQUIRE(d.values.size() == 16);
    CHECK(d.relative_spread < 1e-6);
    CHECK(d.integral == doctest::Approx(tube_mass(m, y0, omega, 0.3)).epsilon(0.05));
    CHECK(tube_mass(m, y0, omega, 0.3) > 0.9);

    // A measure living on the other cycle leaves nothing on y = 0.
    const CycleDensity off = cycle_density(weighted_measure(constant_eigen(t, 0.02), WeightKind::Lyapunov,
                                                            ScalarFunction::parse("4*(1 + cos(y))")),
                                           y0, omega, 16, 0.3, {ypi});
    for (double v : off.values) CHECK(v < 1e-12);

    CHECK_THROWS_AS(cycle_density(m, y0, omega, 16, 2.0, {ypi}), PreconditionError);
}

TEST_CASE("simplex bookkeeping for a large eps")
{
    // No concentration yet: the residual dominates.
    const PeriodicGrid c = build_grid(1, 128, 2 * pi);
    const EigenProblem p{c, FieldSpec::zero(1), ScalarFunction::parse("2 + cos(x)")};
    const auto sweep = epsilon_sweep(p, {50.0});
    ConcentrationTargets tg;
    tg.centers = {{pi, 0}};
    tg.center_labels = {"minimum"};
    ConcentrationOptions o;
    o.delta = 0.2;
    const ConcentrationReport rep = concentration_report(sweep, WeightKind::None, {}, tg, p.b, o);
    CHECK(rep.entries[0].residual_mass > 0.9);
}

TEST_CASE("Richardson extrapolation")
{
    CHECK(richardson_linear(0.2, 1.4, 0.1, 1.2) == doctest::Approx(1.0));
    CHECK(richardson_linear(0.02, 3.0, 0.01, 3.0) == doctest::Approx(3.0));
}
