// Command-line front end: configuration, task pipeline, acceptance suite.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lab/accept.hpp"
#include "lab/runner.hpp"

using namespace lab;

namespace {

LabConfig load_config(const std::string& path) {
    return path.empty() ? LabConfig::defaults() : LabConfig::load(path);
}

int run_pipeline(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed, std::vector<std::string> tasks) {
    auto cfg = load_config(config_path);
    if (tasks.empty()) {
        for (auto name : {"horizons", "evolve", "norms", "resonances", "flow", "carter"}) {
            (void)name;
        }
    }
    auto man = run_tasks(cfg, tasks, out_dir, seed);
    bool ok = true;
    for (auto& t : man.tasks) {
        std::printf("%-12s %-8s %8.2fs %s\n", t.name.c_str(), t.status.c_str(),
                    t.seconds, t.detail.c_str());
        ok = ok && t.status == "ok";
    }
    std::printf("manifest: %s/manifest.json (config %s)\n", out_dir.c_str(),
                man.config_hash.c_str());
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for waves on extended charged black-hole interiors"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::uint64_t seed = 1;
    double budget = 30.0;
    app.add_option("--config", config_path, "configuration file (key = value)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for randomized families");
    app.add_option("--budget", budget, "wall-clock budget in minutes");

    for (auto name : {"horizons", "evolve", "norms", "resonances", "flow", "carter"}) {
        app.add_subcommand(name, std::string("run the ") + name + " task");
    }
    auto* accept = app.add_subcommand("accept", "run the acceptance suite");
    double tol_scale = 1.0;
    accept->add_option("--tol-scale", tol_scale,
                       "scale all tolerances (sensitivity sweeps)");

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto* sub : app.get_subcommands()) {
            if (sub->get_name() == "accept") {
                AcceptanceOptions opt;
                opt.budget_minutes = budget;
                opt.seed = seed;
                opt.tol_scale = tol_scale;
                opt.out_dir = out_dir;
                auto rep = run_acceptance(load_config(config_path), opt);
                if (rep.partial) return 2;
                return rep.all_pass() ? 0 : 1;
            }
            return run_pipeline(config_path, out_dir, seed, {sub->get_name()});
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
