// Command-line front end: `run <config> [--plot] [--out DIR]` executes one
// scenario from a key=value config file, `selftest` runs the acceptance
// suite against this very binary. Exit codes: 0 success, 1 runtime failure,
// 2 bad usage or bad config.

#include "entime/acceptance.hpp"
#include "entime/io.hpp"
#include "entime/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run_command(const std::string& config_path, const std::string& out_dir, bool plot) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "error: cannot open config file '%s'\n", config_path.c_str());
        return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();

    entime::io::ParseResult parsed = entime::io::parse_config(ss.str());
    if (!parsed.errors.empty()) {
        for (const entime::io::ConfigError& e : parsed.errors)
            std::fprintf(stderr, "config-error: (line %d) %s\n", e.line, e.message.c_str());
        return 2;
    }

    try {
        entime::scn::RunManifest manifest =
            entime::scn::run_scenario(*parsed.config, out_dir, plot);
        std::printf("%s", manifest.text().c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: scenario '%s': %s\n",
                     parsed.config->scenario.c_str(), e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropic-time scenario runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool plot = false;
    CLI::App* run = app.add_subcommand("run", "execute one scenario from a config file");
    run->add_option("config", config_path, "path to key=value config file")->required();
    run->add_flag("--plot", plot, "also write an SVG line plot next to the CSV");
    run->add_option("--out", out_dir, "directory for output files (default: cwd)");

    CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 prints its own message; fold every usage problem into exit 2.
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    if (selftest->parsed())
        return entime::acceptance::acceptance_suite(argv[0]) == 0 ? 0 : 1;
    return run_command(config_path, out_dir, plot);
}
