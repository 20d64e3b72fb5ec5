#pragma once

// Subcommand runners behind the vvlab executable. Each run produces a JSON
// report and a set of CSV artifacts, all held in memory until written.

#include <string>
#include <vector>

#include <json.hpp>

#include "vvlab/config.hpp"
#include "vvlab/mesh.hpp"

namespace vvlab {

struct Artifact {
    std::string name;
    std::string content;
};

struct RunOutput {
    nlohmann::json report;
    std::vector<Artifact> artifacts;  // the report itself is added by write_artifacts
    std::string summary;              // short human-readable table for stdout
};

const std::vector<std::string>& subcommands();

/// Throws PreconditionError / ConvergenceError from the underlying modules.
RunOutput run_experiment(const std::string& subcommand, const ExperimentConfig& ex);

/// Writes CSV artifacts and <subcommand>.json according to ex.formats.
void write_artifacts(const RunOutput& out, const std::string& subcommand, const ExperimentConfig& ex);

/// %.17g
std::string format_number(double v);
/// Header "x,value" (1-D) or "x,y,value" (2-D), one row per node.
std::string field_csv(const ScalarSamples& s);

/// 0 success, 2 precondition failure, 3 non-convergence, 1 anything else.
int exit_code_for_current_exception();

}  // namespace vvlab
