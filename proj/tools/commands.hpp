#pragma once

#include <string>
#include <vector>

// CLI command entry points, split from main() so the test suite can drive
// them in-process.  Each returns the process exit status:
//   0  success (and, for scenario commands, all requested assertions pass)
//   1  a scenario assertion failed
//   2  configuration parse or validation error
namespace tailnorm::cli {

struct CommonOptions {
    std::string config_path;  // JSON config file, "" = none
    std::string out_path;     // output file, "" = stdout
    std::string format;       // "json" or "csv", "" = command default
    int grid_points = 0;      // 0 = keep config/default
    int levels = 0;           // 0 = keep config/default
    double tolerance = 0.0;   // 0 = keep config/default
};

int cmd_conjugate(const CommonOptions& opt);
int cmd_moments(const CommonOptions& opt);
int cmd_gls_norm(const CommonOptions& opt);
int cmd_bphi_norm(const CommonOptions& opt);
int cmd_tail_bound(const CommonOptions& opt);
int cmd_lorentz(const CommonOptions& opt);
int cmd_counterexample(const CommonOptions& opt, const std::string& scenario);
int cmd_report(const CommonOptions& opt);

} // namespace tailnorm::cli
