#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "vvlab/config.hpp"
#include "vvlab/error.hpp"
#include "vvlab/fixtures.hpp"

using namespace vvlab;
using std::numbers::pi;

namespace {

std::string message_of(const std::string& text)
{
    try {
        build_experiment(Config::parse(text, "exp.ini"));
    } catch (const PreconditionError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("INI parsing")
{
    const Config c = Config::parse("# comment\n[grid]\ndim = 2 ; trailing\n\n[field]\nfamily= torus_cycles\n", "a.ini");
    REQUIRE(c.find("grid", "dim"));
    CHECK(c.find("grid", "dim")->text == "2");
    CHECK(c.find("grid", "dim")->line == 3);
    CHECK(c.find("field", "family")->text == "torus_cycles");
    CHECK_FALSE(c.has("grid", "n"));

    auto err = [](const char* text) {
        try {
            Config::parse(text, "b.ini");
        } catch (const PreconditionError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(err("[grid]\ndim 2\n").rfind("b.ini:2:", 0) == 0);
    CHECK(err("dim = 2\n").rfind("b.ini:1:", 0) == 0);
    CHECK(err("[grid\n").rfind("b.ini:1:", 0) == 0);
    CHECK(err("[grid]\nn = 1\nn = 2\n").find("duplicate") != std::string::npos);
}

TEST_CASE("overrides and echo")
{
    Config c = Config::parse("[grid]\nn = 64\n");
    c.set_override("grid.n=32");
    c.set_override("sweep.epsilons = 0.1, 0.01");
    CHECK(c.find("grid", "n")->text == "32");
    CHECK(c.find("sweep", "epsilons")->text == "0.1, 0.01");
    CHECK_THROWS_AS(c.set_override("grid_n=3"), PreconditionError);
    CHECK_THROWS_AS(c.set_override("grid.n"), PreconditionError);
    CHECK(c.echo() == "[grid]\nn = 32\n\n[sweep]\nepsilons = 0.1, 0.01\n");
}

TEST_CASE("numbers")
{
    CHECK(parse_number("2*pi") == doctest::Approx(2 * pi));
    CHECK(parse_number("1e-3") == doctest::Approx(1e-3));
    CHECK_THROWS_AS(parse_number("x + 1"), PreconditionError);
    const auto l = parse_number_list("0.2, 0.1,0.05");
    REQUIRE(l.size() == 3);
    CHECK(l[2] == doctest::Approx(0.05));
}

TEST_CASE("experiment validation")
{
    CHECK(message_of("[grid]\ndim = 1\nn = 32\n[bogus]\nk = 1\n").rfind("exp.ini:5: bogus.k:", 0) == 0);
    CHECK(message_of("[grid]\ndim = 1\ncells = 3\n").find("grid.cells: unknown key") != std::string::npos);
    CHECK(message_of("[grid]\ndim = 1\nn = 8\n").rfind("exp.ini:3: grid.n:", 0) == 0);
    CHECK(message_of("[grid]\ndim = 1\n[sweep]\nepsilons = 0.1, 0.2\n").find("strictly decreasing") !=
          std::string::npos);
    CHECK(message_of("[grid]\ndim = 1\n[field]\nfamily = torus_morse\n").find("grid.dim = 2") != std::string::npos);
    CHECK(message_of("[grid]\ndim = 1\n[coefficients]\nc = 1 + sin(y)\n").find("depends on y") != std::string::npos);
    CHECK(message_of("[grid]\ndim = 1\n[coefficients]\nc = sin(\n").rfind("exp.ini:4: coefficients.c:", 0) == 0);
    CHECK(message_of("[run]\nfixture = nope\n").find("unknown fixture") != std::string::npos);
    CHECK(message_of("[grid]\ndim = 2\n[field]\nfamily = torus_cycles\ndrift = shifted\n").find("field.lyapunov") !=
          std::string::npos);
}

TEST_CASE("experiment building")
{
    const ExperimentConfig ex = build_experiment(Config::parse(
        "[grid]\ndim = 2\nn = 32\n[field]\nfamily = shifted_torus_cycles\nparams = kappa = 3\n"
        "[coefficients]\nc = 1 + kappa\n[sweep]\nepsilons = 0.2, 0.1\n"));
    CHECK(ex.grid.size() == 32 * 32);
    CHECK(ex.c({0, 0}) == doctest::Approx(4.0));
    CHECK(ex.field({0, pi / 2})[1] == doctest::Approx(-3.0));
    CHECK(ex.epsilons.size() == 2);
    CHECK(ex.scheme == Scheme::ExponentialFitted);
    CHECK(ex.wants("csv"));
}

TEST_CASE("fixtures resolve through the registry")
{
    const ExperimentConfig ex = build_experiment(Config::parse("[run]\nfixture = torus_cycles_lyapunov\n[grid]\nn = 32\n"));
    CHECK(ex.fixture == "torus_cycles_lyapunov");
    CHECK(ex.grid.n(0) == 32);  // the file wins over the preset
    CHECK(ex.lyapunov.has_value());
    CHECK(ex.field({0, pi / 2})[1] == doctest::Approx(-5.0));
    CHECK(ex.weight == "lyapunov");

    // a is an alias of c; overriding one replaces the preset's other spelling.
    const ExperimentConfig w = build_experiment(Config::parse("[run]\nfixture = circle_well\n[coefficients]\nc = 3\n"));
    CHECK(w.c({1, 0}) == doctest::Approx(3.0));

    for (const auto& f : fixture_registry()) {
        CAPTURE(f.name);
        CHECK_NOTHROW(build_experiment(Config::parse("[run]\nfixture = " + f.name + "\n")));
    }
}

TEST_CASE("fixture listing")
{
    const auto all = list_fixtures();
    auto has = [&](const char* n) {
        for (const auto& f : all)
            if (f.name == n) return true;
        return false;
    };
    CHECK(has("torus_morse_gradient"));
    CHECK(has("torus_cycles_lyapunov"));
    CHECK(has("circle_sine_transport"));
    CHECK(has("nonlinear_cubic"));

    const auto cyc = list_fixtures("cycle-concentration");
    REQUIRE(cyc.size() == 1);
    CHECK(cyc[0].name == "torus_cycles_lyapunov");
    CHECK(list_fixtures("no-such-topic").empty());
}
