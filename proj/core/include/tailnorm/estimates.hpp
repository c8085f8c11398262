#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tailnorm {

// Result of a supremum-type estimate computed over a refined grid.  The
// trace holds the supremum after each cumulative refinement level; a
// supremum that keeps growing by more than the configured factor at every
// level is reported through `diverged`, never as a bare infinity mid-pipeline.
struct NormEstimate {
    double value = 0.0;              // last trace entry; +inf only when diverged
    std::vector<double> trace;       // sup per cumulative refinement level
    bool diverged = false;
    std::string method;              // which estimator produced this
    std::optional<double> witness;   // grid point pinning a divergence, if any

    bool finite() const { return !diverged; }
};

} // namespace tailnorm
