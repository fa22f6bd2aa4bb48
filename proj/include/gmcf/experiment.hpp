#pragma once

#include <string>
#include <vector>

namespace gmcf {

/// Exit codes shared by the CLI:
///   0  success / regular point
///   1  configuration or input error
///   2  flow blow-up (partial outputs are written)
///   3  verification failure
///   4  density probe flagged suspicious

int cmd_run(const std::string& config_path, const std::string& out_dir,
            int threads_override = -1);

int cmd_verify(const std::string& config_path, const std::string& out_dir);

struct MonitorArgs {
    std::vector<std::string> checkpoints;  // paths or simple '*' patterns
    std::string y0_spec;  // "ambient:c1,..." | "graph:x1,..." | bare list
    double t0 = 0.0;
    double epsilon = 0.05;
    std::string out_dir;
    int threads_override = -1;
};

int cmd_monitor(const MonitorArgs& args);

}  // namespace gmcf
