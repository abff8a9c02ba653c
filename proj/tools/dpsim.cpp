// dpsim: run named experiments and write their reports.
//
//   dpsim list
//   dpsim run <experiment> [--config PATH] [--seed N] [--out DIR]
//                          [--format csv|json] [--full] [--threads N]
//
// Every flag can also come from DPSIM_CONFIG, DPSIM_SEED, DPSIM_OUT,
// DPSIM_FORMAT, DPSIM_FULL and DPSIM_THREADS. Exit codes: 0 ok, 1 config or
// usage error, 2 failure inside an experiment.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dpsim/config.h"
#include "dpsim/experiments.h"

namespace {

std::string experiment_help()
{
    std::string s = "Experiments:\n";
    for (const auto& e : dpsim::list_experiments()) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "  %-20s %s [%s]\n", e.name.c_str(), e.description.c_str(),
                      e.reproduces.c_str());
        s += buf;
    }
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dataplant DRAM security-primitive simulator"};
    app.require_subcommand(1);
    app.footer(experiment_help());

    auto* list = app.add_subcommand("list", "List experiments and the table each one reproduces");

    auto* run = app.add_subcommand("run", "Run one experiment");
    std::string name, config_path, out_dir = "results", format = "csv";
    std::optional<std::uint64_t> seed;
    bool full = false;
    unsigned threads = 1;
    run->add_option("experiment", name, "Experiment name")->required();
    run->add_option("--config", config_path, "JSON config file (default: built-in DDR3-1600 64MB)")
        ->envname("DPSIM_CONFIG");
    run->add_option("--seed", seed, "Master seed, overrides the config")->envname("DPSIM_SEED");
    run->add_option("--out", out_dir, "Output directory")->envname("DPSIM_OUT")->capture_default_str();
    run->add_option("--format", format, "Output format")
        ->envname("DPSIM_FORMAT")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    run->add_flag("--full", full, "Larger Monte Carlo counts")->envname("DPSIM_FULL");
    run->add_option("--threads", threads, "Worker threads (output does not depend on it)")
        ->envname("DPSIM_THREADS")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    run->footer(experiment_help());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (list->parsed()) {
        for (const auto& e : dpsim::list_experiments())
            std::cout << e.name << "\t" << e.reproduces << "\t" << e.description << "\n";
        return 0;
    }

    if (!dpsim::has_experiment(name)) {
        std::string hint = dpsim::suggest_experiment(name);
        std::cerr << "dpsim: unknown experiment '" << name << "'";
        if (!hint.empty())
            std::cerr << "; did you mean '" << hint << "'?";
        std::cerr << " (see 'dpsim list')\n";
        return 1;
    }

    dpsim::DramConfig cfg;
    try {
        cfg = config_path.empty() ? dpsim::default_config() : dpsim::load_config_file(config_path);
        if (seed) {
            cfg.variation.master_seed = *seed;
            cfg = dpsim::validate_config(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "dpsim: config error: " << e.what() << "\n";
        return 1;
    }

    try {
        dpsim::RunOptions opts;
        opts.full = full;
        opts.threads = threads;
        auto report = dpsim::run_experiment(name, cfg, opts);
        for (const auto& f : dpsim::write_report(report, out_dir, format))
            std::cout << f << "\n";
    } catch (const std::exception& e) {
        std::cerr << "dpsim: " << name << " failed: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
