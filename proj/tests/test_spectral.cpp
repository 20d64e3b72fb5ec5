#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dense_oracle.hpp"
#include "oracle_values.hpp"
#include "vvlab/error.hpp"
#include "vvlab/spectral.hpp"

using namespace vvlab;
using std::numbers::pi;

namespace {

EigenProblem circle_problem(int n, const char* b, const char* c)
{
    const PeriodicGrid g = build_grid(1, n, 2 * pi);
    return {g, FieldSpec::expression(1, Expr::parse(b)), ScalarFunction::parse(c)};
}

double entry(const SparseRowMatrix& m, std::size_t r, std::size_t c)
{
    return m.coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

}  // namespace

TEST_CASE("Bernoulli function")
{
    CHECK(bernoulli(0.0) == 1.0);
    for (double z : {1e-6, 1e-3, 0.5, 3.0, -2.0, 40.0, -40.0})
        CHECK(bernoulli(z) == doctest::Approx(z / std::expm1(z)).epsilon(1e-13));
    // B(z) - B(-z) = -z
    for (double z : {1e-9, 1e-5, 0.2, 7.0}) CHECK(bernoulli(z) - bernoulli(-z) == doctest::Approx(-z).epsilon(1e-12));
    CHECK(bernoulli(800.0) >= 0.0);
    CHECK(bernoulli(-800.0) == doctest::Approx(800.0));
}

TEST_CASE("assembly: pure diffusion")
{
    const PeriodicGrid g = build_grid(1, 32, 2 * pi);
    const double eps = 0.3, h = g.h(0);
    const OperatorAssembly op = assemble(g, eps, VectorSamples(g), ScalarSamples(g, 0.0));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(entry(op.matrix, i, i) == doctest::Approx(2 * eps / (h * h)));
        CHECK(entry(op.matrix, i, g.shifted(i, 0, 1)) == doctest::Approx(-eps / (h * h)));
        CHECK(entry(op.matrix, i, g.shifted(i, 0, -1)) == doctest::Approx(-eps / (h * h)));
    }
    CHECK(check_m_matrix(op).max_abs_row_sum < 1e-12);
    CHECK(check_m_matrix(op).pass());
}

TEST_CASE("assembly: fitted weights approach central weights")
{
    // With a small face drift the fitted and central off-diagonals differ by O(z^2).
    const PeriodicGrid g = build_grid(1, 64, 2 * pi);
    auto gap = [&](double amp) {
        const VectorSamples b = sample_vector(g, [amp](const Point&) { return Point{amp, 0}; });
        const double eps = 1.0;
        const auto fit = assemble(g, eps, b, ScalarSamples(g, 0.0), Scheme::ExponentialFitted);
        const auto cen = assemble(g, eps, b, ScalarSamples(g, 0.0), Scheme::Central);
        return std::abs(entry(fit.matrix, 0, 1) - entry(cen.matrix, 0, 1));
    };
    const double g1 = gap(1e-2), g2 = gap(5e-3);
    CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(1e-3));

    const VectorSamples strong = sample_field(FieldSpec::circle_sine(), g);
    CHECK_THROWS_AS(assemble(g, 1e-3, strong, ScalarSamples(g, 1.0), Scheme::Central), PreconditionError);
    CHECK_NOTHROW(assemble(g, 1e-3, strong, ScalarSamples(g, 1.0), Scheme::Central, true));
    CHECK_THROWS_AS(assemble(g, 0.0, strong, ScalarSamples(g, 1.0)), PreconditionError);
}

TEST_CASE("M-matrix at moderate Peclet number")
{
    const EigenProblem p = circle_problem(64, "-sin(x)", "1");
    const MMatrixCheck chk = check_m_matrix(assemble_problem(p, 0.05));
    CHECK(chk.offdiag_nonpositive);
    CHECK(chk.pass());
    CHECK(check_m_matrix(assemble_problem(p, 1e-4)).pass());
}

TEST_CASE("principal eigenpair: constant coefficient")
{
    const EigenProblem p = circle_problem(64, "0", "5");
    for (double eps : {1.0, 0.1, 0.01}) {
        const EigenResult r = principal_eigenpair(assemble_problem(p, eps));
        CHECK(std::abs(r.lambda - 5.0) < 1e-10);
        const auto [lo, hi] = std::minmax_element(r.u.values.begin(), r.u.values.end());
        CHECK(*hi - *lo < 1e-10);
        CHECK(integrate(ScalarSamples(r.u.grid, [&] {
                  auto v = r.u.values;
                  for (auto& x : v) x *= x;
                  return v;
              }())) == doctest::Approx(1.0));
    }
}

TEST_CASE("principal eigenpair: harmonic approximation")
{
    const EigenProblem p = circle_problem(64, "0", "2 + cos(x)");
    const EigenResult r = principal_eigenpair(assemble_problem(p, 0.01));
    const double harmonic = 1 + std::sqrt(0.01 / 2);
    CHECK(std::abs(r.lambda - 1.0) <= 1.2 * (harmonic - 1.0));
    CHECK(std::abs(r.lambda - 1.0) >= 0.8 * (harmonic - 1.0));
}

TEST_CASE("principal eigenpair matches the dense oracle")
{
    for (const char* b : {"0", "-sin(x)", "0.5*cos(x) - 0.3"}) {
        const EigenProblem p = circle_problem(64, b, "1 + 0.75*cos(x)");
        for (double eps : {0.5, 0.05, 0.01}) {
            const OperatorAssembly op = assemble_problem(p, eps);
            const EigenResult r = principal_eigenpair(op);
            const oracle::DenseEigen d = oracle::dense_principal(op);
            CHECK(std::abs(r.lambda - d.lambda) < 1e-8);
            double du = 0.0;
            for (std::size_t i = 0; i < d.u.size(); ++i) du = std::max(du, std::abs(r.u[i] - d.u[i]));
            CHECK(du < 1e-6);
        }
    }
}

TEST_CASE("principal eigenpair matches the frozen numpy values")
{
    const EigenProblem p = circle_problem(64, "-sin(x)", "1 + 0.75*cos(x)");
    for (std::size_t k = 0; k < std::size(oracle::kSinePressureEps); ++k) {
        const EigenResult r = principal_eigenpair(assemble_problem(p, oracle::kSinePressureEps[k]));
        CHECK(r.lambda == doctest::Approx(oracle::kSinePressureLambda64[k]).epsilon(1e-10));
    }
}

TEST_CASE("adjoint consistency and comparison principle")
{
    const EigenProblem p = circle_problem(128, "-sin(x)", "1 + 0.5*cos(x)");
    const OperatorAssembly op = assemble_problem(p, 0.05);
    const EigenResult right = principal_eigenpair(op);
    EigenOptions adj;
    adj.adjoint = true;
    const EigenResult left = principal_eigenpair(op, adj);
    CHECK(std::abs(right.lambda - left.lambda) < 1e-9);

    // Lowering c pointwise can only lower the principal eigenvalue.
    const EigenProblem lower = circle_problem(128, "-sin(x)", "1 + 0.5*cos(x) - 0.2*(1 + sin(x))");
    const EigenProblem lower2 = circle_problem(128, "-sin(x)", "0.5 + 0.5*cos(x)");
    const double l0 = right.lambda;
    const double l1 = principal_eigenpair(assemble_problem(lower, 0.05)).lambda;
    const double l2 = principal_eigenpair(assemble_problem(lower2, 0.05)).lambda;
    CHECK(l1 <= l0);
    CHECK(l2 <= l1 + 1e-12);
    CHECK(l2 == doctest::Approx(l0 - 0.5));
}

TEST_CASE("Rayleigh quotient for b = 0")
{
    const EigenProblem p = circle_problem(128, "0", "2 + cos(x)");
    const PeriodicGrid& g = p.grid;
    const ScalarSamples a = sample(g, [](const Point& x) { return 2 + std::cos(x[0]); });
    for (double eps : {0.2, 0.02}) {
        const EigenResult r = principal_eigenpair(assemble_problem(p, eps));
        CHECK(std::abs(rayleigh_quotient(g, eps, a, r.u) - r.lambda) < 1e-8);
        // Any other function gives a larger quotient.
        ScalarSamples v = r.u;
        for (std::size_t i = 0; i < g.size(); ++i) v[i] *= 1 + 0.1 * std::sin(g.coord(i)[0]);
        CHECK(rayleigh_quotient(g, eps, a, v) > r.lambda);
    }
}

TEST_CASE("epsilon sweep")
{
    const EigenProblem p = circle_problem(256, "0", "2 + cos(x)");
    const std::vector<double> eps(std::begin(oracle::kCircleWellEps), std::end(oracle::kCircleWellEps));
    const auto sweep = epsilon_sweep(p, eps);
    REQUIRE(sweep.size() == eps.size());
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        CHECK(sweep[k].lambda == doctest::Approx(oracle::kCircleWellLambda[k]).epsilon(1e-10));
        if (k) CHECK(sweep[k].lambda < sweep[k - 1].lambda);
    }
    // Warm starts do not change the answer.
    const EigenResult cold = principal_eigenpair(assemble_problem(p, 0.01));
    CHECK(cold.lambda == doctest::Approx(sweep.back().lambda).epsilon(1e-12));

    CHECK_THROWS_AS(epsilon_sweep(p, {0.1, 0.2}), PreconditionError);
    const auto flat = epsilon_sweep(circle_problem(64, "0", "3"), {1.0, 0.1});
    CHECK(flat[0].lambda == doctest::Approx(3.0));
    CHECK(flat[1].lambda == doctest::Approx(3.0));

    // Failures name the eps they came from.
    EigenProblem central = circle_problem(64, "-sin(x)", "1");
    central.scheme = Scheme::Central;
    try {
        epsilon_sweep(central, {0.5, 1e-3});
        FAIL("no throw");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("eps=0.001") != std::string::npos);
    }
}

TEST_CASE("gradient transform")
{
    const PeriodicGrid g = build_grid(1, 64, 2 * pi);
    const ScalarSamples a = gradient_transform(ScalarFunction::parse("cos(x)"), 0.1, ScalarFunction::parse("1"), g);
    // u = exp(phi / 2 eps) v turns -eps u'' + phi' u' + c u into -eps v'' + (phi'^2 / 4 eps - phi'' / 2 + c) v,
    // so with Delta = -d^2/dx^2 the eps term is +eps cos(x) / 2 for phi = cos x.
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coord(i)[0];
        CHECK(a[i] == doctest::Approx(0.1 + std::sin(x) * std::sin(x) / 4 + 0.05 * std::cos(x)));
    }
    const ScalarSamples flat = gradient_transform(ScalarFunction::parse("2"), 0.3, ScalarFunction::parse("1.5"), g);
    for (double v : flat.values) CHECK(v == doctest::Approx(0.45));

    // min a_eps -> 0 with eps, located at critical points of phi.
    double prev = 1e9;
    for (double eps : {0.1, 0.01, 0.001}) {
        const ScalarSamples ae = gradient_transform(ScalarFunction::parse("cos(x)"), eps, ScalarFunction::parse("1"), g);
        const double m = *std::min_element(ae.values.begin(), ae.values.end());
        CHECK(m < prev);
        prev = m;
    }
    CHECK(std::abs(prev) < 2e-3);

    std::vector<std::string> warnings;
    gradient_transform(ScalarFunction::parse("-3*cos(x)"), 0.1, ScalarFunction::parse("1 - 0.5*cos(x)"), g, &warnings);
    CHECK_FALSE(warnings.empty());

    // The transformed operator carries lambda_eps.
    const EigenProblem grad{g, FieldSpec::gradient(Expr::parse("cos(x)"), 1), ScalarFunction::parse("1")};
    const double eps = 0.2;
    const double lam = principal_eigenpair(assemble_problem(grad, eps)).lambda;
    const double tl =
        principal_eigenpair(transformed_assembly(ScalarFunction::parse("cos(x)"), eps, ScalarFunction::parse("1"), g))
            .lambda;
    CHECK(tl == doctest::Approx(lam).epsilon(1e-2));
}

TEST_CASE("pressure candidates")
{
    const PeriodicGrid g = build_grid(1, 64, 2 * pi);
    const FieldSpec s = FieldSpec::circle_sine();
    const RecurrentSet rs = classify_recurrent_set(s, g);
    const PressurePrediction p = pressure_prediction(rs, s, ScalarFunction::parse("2"));
    REQUIRE(p.candidates.size() == 2);
    CHECK(p.max == doctest::Approx(2.0));
    CHECK(p.min == doctest::Approx(1.0));
    CHECK(p.matched.empty());

    const PeriodicGrid t = build_grid(2, 64, 2 * pi);
    const FieldSpec cyc = FieldSpec::torus_cycles();
    const RecurrentSet crs = classify_recurrent_set(cyc, t, 0, 32);
    const PressurePrediction q = pressure_prediction(crs, cyc, ScalarFunction::parse("1"), 0.0);
    CHECK(q.max == doctest::Approx(1.0));
    CHECK(std::abs(q.min) < 1e-6);
    CHECK(q.matched == "min");

    RecurrentSet bad;
    bad.fixed_points.push_back(classify_fixed_point(FieldSpec::expression(1, Expr::parse("sin(x)^3")), {0, 0}));
    CHECK_THROWS_AS(pressure_prediction(bad, s, ScalarFunction::parse("1")), PreconditionError);
}
