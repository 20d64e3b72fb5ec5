#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vvlab/cli.hpp"
#include "vvlab/error.hpp"

using namespace vvlab;

namespace {

ExperimentConfig fixture(const std::string& name, const std::string& extra = "")
{
    return build_experiment(Config::parse("[run]\nfixture = " + name + "\n" + extra));
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("eigen on a constant coefficient")
{
    const RunOutput out = run_experiment("eigen", fixture("constant_identity"));
    const auto& res = out.report["results"];
    REQUIRE(res.size() == 3);
    for (const auto& r : res) {
        CHECK(r["lambda"].get<double>() == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(r["m_matrix"]["offdiag_nonpositive"].get<bool>());
    }
    bool has_sweep = false;
    for (const auto& a : out.artifacts)
        if (a.name == "sweep.csv") {
            has_sweep = true;
            CHECK(a.content.rfind("eps,lambda,eps_lambda,residual,iterations\r\n", 0) == 0);
        }
    CHECK(has_sweep);
}

TEST_CASE("transport fixed-point table")
{
    const RunOutput out =
        run_experiment("transport", fixture("circle_sine_transport", "[analysis]\ntransport_epsilons = 0.1\n"));
    const auto& fps = out.report["fixed_points"];
    REQUIRE(fps.size() == 2);
    for (const auto& fp : fps) CHECK(fp["error"].get<double>() < 1e-6);
}

TEST_CASE("verify the shipped Lyapunov function")
{
    const RunOutput out = run_experiment("verify", fixture("torus_cycles_lyapunov", "[grid]\nn = 64\n"));
    CHECK(out.report["pass"].get<bool>());
    CHECK(out.summary.find("PASS") != std::string::npos);

    const RunOutput bad = run_experiment(
        "verify", fixture("torus_cycles_lyapunov", "[grid]\nn = 64\n[field]\nlyapunov = 1 - cos(y)\n"));
    CHECK_FALSE(bad.report["pass"].get<bool>());
}

TEST_CASE("artifacts and formats")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(VVLAB_TEST_TMP) / "cli_artifacts";
    fs::remove_all(dir);
    const ExperimentConfig ex =
        fixture("constant_identity", "[output]\ndir = " + dir.string() + "\nformats = json\n");
    write_artifacts(run_experiment("eigen", ex), "eigen", ex);
    CHECK(fs::exists(dir / "eigen.json"));
    CHECK_FALSE(fs::exists(dir / "sweep.csv"));
    CHECK(slurp(dir / "eigen.json").find("\"fixture\": \"constant_identity\"") != std::string::npos);
}

TEST_CASE("number and field formatting")
{
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
    const PeriodicGrid g = build_grid(1, 16, 1.0);
    const std::string csv = field_csv(ScalarSamples(g, 1.5));
    CHECK(csv.rfind("x,value\r\n0,1.5\r\n0.0625,1.5\r\n", 0) == 0);
}

TEST_CASE("exit codes")
{
    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (...) {
            return exit_code_for_current_exception();
        }
        return 0;
    };
    CHECK(code([] { throw PreconditionError("x"); }) == 2);
    CHECK(code([] { throw ConvergenceError("x"); }) == 3);
    CHECK(code([] { throw std::runtime_error("x"); }) == 1);
    CHECK(code([] { run_experiment("nope", fixture("constant_identity")); }) == 2);
    CHECK(code([] { run_experiment("pressure", fixture("constant_identity", "[sweep]\nepsilons = 1\n")); }) == 2);
}
