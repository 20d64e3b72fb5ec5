#pragma once

// Normalised measures built from principal eigenfunctions and their mass
// bookkeeping: Dirac weights at fixed points, densities along cycles.

#include <string>
#include <vector>

#include "vvlab/dynsys.hpp"
#include "vvlab/expr.hpp"
#include "vvlab/mesh.hpp"
#include "vvlab/spectral.hpp"

namespace vvlab {

enum class WeightKind { None, Potential, Lyapunov };
std::string to_string(WeightKind k);

struct Measure {
    ScalarSamples density;  // non-negative, integrates to 1
    WeightKind weight_kind = WeightKind::None;
    double eps = 0.0;
};

/// Density exp((min W - W)/eps) * u^2, renormalised. W is ignored for None.
/// Throws PreconditionError when the unnormalised mass drops below 1e-300.
Measure weighted_measure(const EigenResult& u, WeightKind kind, const ScalarFunction& W = ScalarFunction{});

/// Mass of the periodic ball of radius delta around P. Needs delta >= 2h.
double ball_mass(const Measure& m, const Point& P, double delta);

/// Mass within half_width of the orbit polyline. Nodes near the edge count
/// with the fraction of their cell that lies inside.
double tube_mass(const Measure& m, const PeriodicOrbit& orbit, const FieldSpec& spec, double half_width);

struct CycleDensity {
    std::vector<double> stations;  // arclength of each station
    std::vector<double> values;    // f^2 at each station
    double integral = 0.0;         // trapezoid over the closed orbit, i.e. sum f^2 * dl
    double mean = 0.0;
    double relative_spread = 0.0;  // (max - min) / mean
};

/// Integrals of the density over straight transversal segments of half-length
/// half_width, equally spaced in arclength. Refuses when the segments can
/// cross each other (half_width times curvature >= 1) or reach another orbit.
CycleDensity cycle_density(const Measure& m, const PeriodicOrbit& orbit, const FieldSpec& spec, int n_stations,
                           double half_width, const std::vector<PeriodicOrbit>& others = {});

/// Where mass is expected to gather: points (fixed points or minima of a) and cycles.
struct ConcentrationTargets {
    std::vector<Point> centers;
    std::vector<std::string> center_labels;
    std::vector<PeriodicOrbit> orbits;
};

ConcentrationTargets targets_from(const RecurrentSet& rs);
/// Strict local minima of sampled values (the wells of a when b = 0).
ConcentrationTargets targets_from_minima(const ScalarSamples& a);

struct ConcentrationEntry {
    double eps = 0.0;
    std::vector<double> ball_masses;
    std::vector<double> tube_masses;
    std::vector<CycleDensity> cycle_densities;
    double residual_mass = 0.0;
};

struct ConcentrationReport {
    ConcentrationTargets targets;
    WeightKind weight_kind = WeightKind::None;
    double delta = 0.0;
    double half_width = 0.0;
    int n_stations = 0;
    std::vector<ConcentrationEntry> entries;
};

struct ConcentrationOptions {
    double delta = 0.4;
    double half_width = 0.3;
    int n_stations = 16;
};

/// Balls must be pairwise disjoint and disjoint from the tubes.
ConcentrationReport concentration_report(const std::vector<EigenResult>& sweep, WeightKind kind, const ScalarFunction& W,
                                         const ConcentrationTargets& targets, const FieldSpec& spec,
                                         const ConcentrationOptions& opts);

/// Linear-in-eps extrapolation to eps = 0 from the last two sweep values.
double richardson_linear(double eps1, double v1, double eps2, double v2);

struct SimplexVerdict {
    double max_bookkeeping_error = 0.0;  // |sum balls + sum tubes + residual - 1|
    bool bookkeeping = false;
    bool residual_nonincreasing = false;
    std::vector<double> ball_limits;
    std::vector<double> tube_limits;
    double residual_limit = 0.0;

    bool pass() const { return bookkeeping && residual_nonincreasing; }
};

SimplexVerdict simplex_check(const ConcentrationReport& report);

}  // namespace vvlab
