#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmcf/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"gmcf: mean curvature flow of graphic submanifolds"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int threads = -1;

    auto* run = app.add_subcommand("run", "run a configured flow experiment");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--threads", threads, "worker threads (0 = all cores)");

    auto* verify = app.add_subcommand("verify", "run the verification suites");
    verify->add_option("--config", config_path, "verification config file");
    verify->add_option("--out", out_dir, "output directory");

    gmcf::MonitorArgs margs;
    auto* monitor =
        app.add_subcommand("monitor", "Gaussian density probe over checkpoints");
    monitor->add_option("--checkpoints", margs.checkpoints,
                        "checkpoint paths or '*' patterns")
        ->required()
        ->expected(-1);
    monitor
        ->add_option("--y0", margs.y0_spec,
                     "probe center: 'graph:x1,..' or 'ambient:c1,..' or bare list")
        ->required();
    monitor->add_option("--t0", margs.t0, "probe time (after all checkpoints)")
        ->required();
    monitor->add_option("--epsilon", margs.epsilon, "regularity threshold");
    monitor->add_option("--out", margs.out_dir, "output directory");
    monitor->add_option("--threads", margs.threads_override, "worker threads");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return gmcf::cmd_run(config_path, out_dir, threads);
    if (verify->parsed()) return gmcf::cmd_verify(config_path, out_dir);
    margs.out_dir = margs.out_dir.empty() ? out_dir : margs.out_dir;
    return gmcf::cmd_monitor(margs);
}
