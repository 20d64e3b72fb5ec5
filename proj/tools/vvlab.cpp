// vvlab: batch runner for the eigenvalue, concentration and transport experiments.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vvlab/cli.hpp"
#include "vvlab/config.hpp"
#include "vvlab/fixtures.hpp"

namespace {

int run(const std::string& sub, const std::string& config_path, const std::vector<std::string>& sets,
        const std::string& out_dir)
{
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    vvlab::Config cfg = vvlab::Config::load(config_path);
    for (const auto& s : sets) cfg.set_override(s);
    if (!out_dir.empty()) cfg.set("output", "dir", out_dir, "--out");
    const vvlab::ExperimentConfig ex = vvlab::build_experiment(cfg);
    const vvlab::RunOutput out = vvlab::run_experiment(sub, ex);
    vvlab::write_artifacts(out, sub, ex);
    std::cout << out.summary;
    // Timing stays off the artifacts so reruns are byte-identical.
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    std::fprintf(stderr, "%s finished in %.2f s, outputs in %s\n", sub.c_str(), secs, ex.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"vvlab: vanishing-viscosity eigenvalue and transport laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir, topic;
    std::vector<std::string> sets;
    std::string chosen;
    for (const auto& name : vvlab::subcommands()) {
        CLI::App* sc = app.add_subcommand(name, "run the " + name + " experiment");
        sc->add_option("--config", config_path, "INI experiment file")->required()->check(CLI::ExistingFile);
        sc->add_option("--set", sets, "override as section.key=value (repeatable)");
        sc->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sc->callback([&chosen, name] { chosen = name; });
    }
    CLI::App* lf = app.add_subcommand("list-fixtures", "show the compiled-in fixtures");
    lf->add_option("--topic", topic, "only fixtures tagged with this topic");
    lf->callback([&chosen] { chosen = "list-fixtures"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (chosen == "list-fixtures") {
            for (const auto& f : vvlab::list_fixtures(topic)) {
                std::cout << f.name << "  [";
                for (std::size_t i = 0; i < f.topics.size(); ++i) std::cout << (i ? ", " : "") << f.topics[i];
                std::cout << "]\n    " << f.summary << "\n";
            }
            return 0;
        }
        return run(chosen, config_path, sets, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "vvlab " << chosen << ": " << e.what() << "\n";
        return vvlab::exit_code_for_current_exception();
    }
}
