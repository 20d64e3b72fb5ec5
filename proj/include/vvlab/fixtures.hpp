#pragma once

// Compiled-in experiment presets. Each fixture is an INI fragment that a
// config file can pull in with [run] fixture = <name>.

#include <string>
#include <vector>

namespace vvlab {

struct Fixture {
    std::string name;
    std::vector<std::string> topics;
    std::string summary;
    std::string preset;  // INI text
};

const std::vector<Fixture>& fixture_registry();

/// Throws PreconditionError for unknown names.
const Fixture& find_fixture(const std::string& name);

/// Empty topic returns everything. Throws if the registry is empty.
std::vector<Fixture> list_fixtures(const std::string& topic = "");

}  // namespace vvlab
