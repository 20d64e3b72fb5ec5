#include "vvlab/fixtures.hpp"

#include <algorithm>

#include "vvlab/error.hpp"

namespace vvlab {

const std::vector<Fixture>& fixture_registry()
{
    static const std::vector<Fixture> registry = {
        {"constant_identity",
         {"identity", "eigenvalue-limit"},
         "b = 0, c = 5: the eigenpair is (5, constant) at every eps",
         R"([grid]
dim = 1
n = 64
[field]
family = zero
[coefficients]
c = 5
f = 1
[sweep]
epsilons = 1, 0.1, 0.01
)"},
        {"circle_well",
         {"eigenvalue-limit", "concentration"},
         "b = 0, a = 2 + cos x on the circle: lambda -> min a = 1, mass gathers at x = pi",
         R"([grid]
dim = 1
n = 256
[field]
family = zero
[coefficients]
a = 2 + cos(x)
[sweep]
epsilons = 0.2, 0.1, 0.05, 0.02, 0.01
[analysis]
delta = 0.5
)"},
        {"torus_morse_gradient",
         {"weighted-measure", "concentration"},
         "b = grad(phi), phi = -(cos x + cos y): exp(-phi/eps) u^2 gathers at the four critical points",
         R"([grid]
dim = 2
n = 128
[field]
family = torus_morse
[coefficients]
phi = -(cos(x) + cos(y))
c = 1 + 0.25*(cos(x) + cos(y))
[sweep]
epsilons = 0.2, 0.1, 0.05, 0.02
[analysis]
weight = phi
delta = 0.4
)"},
        {"torus_cycles_lyapunov",
         {"cycle-concentration", "lyapunov", "concentration"},
         "Omega = (1, -sin y), L = 4(1 - cos y), b = -grad L + Omega, c = 1",
         R"([grid]
dim = 2
n = 128
[field]
family = torus_cycles
lyapunov = 4*(1 - cos(y))
drift = shifted
[coefficients]
c = 1
[sweep]
epsilons = 0.2, 0.1, 0.05, 0.02
[analysis]
weight = lyapunov
tube_half_width = 0.3
extra_half_widths = 0.5
n_stations = 16
)"},
        {"circle_sine_transport",
         {"transport"},
         "b = -sin x, c = 2, f = 3 + cos x: u(0) = 2, u(pi) = 1",
         R"([grid]
dim = 1
n = 256
[field]
family = circle_sine
[coefficients]
c = 2
f = 3 + cos(x)
[analysis]
transport_epsilons = 0.1, 0.05, 0.02
tube_radius = 0.1
tail_tol = 1e-10
)"},
        {"torus_cycles_transport",
         {"transport", "limit-cycle"},
         "b = (1, -sin y), c = 2, f = 1 + sin y: partial integrals on and off the repelling cycle",
         R"([grid]
dim = 2
n = 96
[field]
family = torus_cycles
[coefficients]
c = 2
f = 1 + sin(y)
[analysis]
tube_radius = 0.1
osc_points = 0 pi; 1 1
osc_t_max = 60
osc_window = 2*pi
)"},
        {"nonlinear_contractive",
         {"nonlinear"},
         "b = -(0.5 + 0.05 sin lambda) sin x, c = 3 + 0.2 cos x + 0.1 lambda, f = 2 + cos x: conditions 1-3 hold",
         R"([grid]
dim = 1
n = 128
[field]
family = expression
bx = -(0.5 + 0.05*sin(lambda))*sin(x)
[coefficients]
c = 3 + 0.2*cos(x) + 0.1*lambda
f = 2 + cos(x)
[analysis]
lambda_lo = -2
lambda_hi = 2
n_lambda = 129
u0 = 0
picard_tol = 1e-9
)"},
        {"nonlinear_cubic",
         {"nonlinear", "branches"},
         "b = -sin x, c = 1 + (lambda - 2)^2, f = 1.9: three roots per fixed point, 9 combinations",
         R"([grid]
dim = 1
n = 128
[field]
family = circle_sine
[coefficients]
c = 1 + (lambda - 2)^2
f = 1.9
[analysis]
lambda_lo = 0
lambda_hi = 3
n_lambda = 129
u0 = 0.7
picard_tol = 1e-6
picard_dt = 0.05
)"},
        {"circle_sine_pressure",
         {"pressure"},
         "b = -sin x, c = 1 + 0.75 cos x: sweep limit against the fixed-point pressure candidates",
         R"([grid]
dim = 1
n = 256
[field]
family = circle_sine
[coefficients]
c = 1 + 0.75*cos(x)
[sweep]
epsilons = 0.2, 0.1, 0.05, 0.02, 0.01
)"},
    };
    return registry;
}

const Fixture& find_fixture(const std::string& name)
{
    const auto& reg = fixture_registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const Fixture& f) { return f.name == name; });
    if (it == reg.end()) throw PreconditionError("unknown fixture '" + name + "' (see list-fixtures)");
    return *it;
}

std::vector<Fixture> list_fixtures(const std::string& topic)
{
    const auto& reg = fixture_registry();
    if (reg.empty()) throw PreconditionError("fixture registry is empty");
    std::vector<Fixture> out;
    for (const auto& f : reg)
        if (topic.empty() || std::find(f.topics.begin(), f.topics.end(), topic) != f.topics.end()) out.push_back(f);
    return out;
}

}  // namespace vvlab
