#pragma once

// INI-style experiment configuration: [section] headers, key = value lines,
// '#' or ';' comments. Values keep their source line for diagnostics.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vvlab/dynsys.hpp"
#include "vvlab/expr.hpp"
#include "vvlab/mesh.hpp"
#include "vvlab/spectral.hpp"

namespace vvlab {

struct ConfigValue {
    std::string text;
    std::string source;
    int line = 0;
};

class Config {
public:
    using Section = std::map<std::string, ConfigValue>;

    /// Throws PreconditionError as "source:line: message".
    static Config parse(std::string_view text, const std::string& source = "<config>");
    static Config load(const std::string& path);

    /// "section.key=value", as given to --set.
    void set_override(const std::string& assignment);
    void set(const std::string& section, const std::string& key, const std::string& value,
             const std::string& source = "<set>", int line = 0);
    void erase(const std::string& section, const std::string& key);
    /// Fill keys missing here from `base`.
    void inherit(const Config& base);

    bool has(const std::string& section, const std::string& key) const;
    const ConfigValue* find(const std::string& section, const std::string& key) const;
    const std::map<std::string, Section>& sections() const { return sections_; }

    /// Canonical text: sections and keys sorted, one "key = value" per line.
    std::string echo() const;

private:
    std::map<std::string, Section> sections_;
};

/// Typed view of a Config with every name resolved.
struct ExperimentConfig {
    Config raw;
    std::string fixture;

    PeriodicGrid grid{1, {16, 1}, {1.0, 1.0}};
    ParamMap params;

    std::string family;
    FieldSpec omega = FieldSpec::zero(1);  // the family itself
    FieldSpec field = FieldSpec::zero(1);  // drift used by the solvers
    std::optional<ScalarFunction> lyapunov;
    int section_axis = 0;
    int n_sections = 64;

    ScalarFunction c;
    ScalarFunction f;
    std::optional<ScalarFunction> phi;

    std::vector<double> epsilons;
    Scheme scheme = Scheme::ExponentialFitted;
    bool allow_central = false;

    double delta = 0.4;
    double tube_half_width = 0.3;
    std::vector<double> extra_half_widths;
    int n_stations = 16;
    std::string weight = "none";
    double tube_radius = 0.1;
    double dt = 2e-3 * 3.141592653589793;
    double tail_tol = 1e-10;
    std::vector<double> transport_epsilons;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    int n_lambda = 129;
    double u0 = 0.0;
    double picard_tol = 1e-9;
    double picard_dt = 1e-2;
    double picard_tail_tol = 1e-8;
    std::vector<Point> osc_points;
    double osc_t_max = 60.0;
    double osc_window = 2.0 * 3.141592653589793;
    double lyapunov_tol = 1e-8;
    double lyapunov_delta = 0.0;

    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};

    bool wants(const std::string& format) const;
};

/// Resolves [run] fixture = name against the registry (preset values are
/// overridden by the file), validates every key, and builds the typed view.
ExperimentConfig build_experiment(Config cfg);

std::vector<double> parse_number_list(const std::string& text, const ParamMap& params = {});
double parse_number(const std::string& text, const ParamMap& params = {});

}  // namespace vvlab
