#pragma once

#include <cstddef>
#include <vector>

#include "tailnorm/errors.hpp"

namespace tailnorm {

// A one-dimensional evaluation grid split into refinement levels.  Norm
// suprema are tracked per cumulative level; persistent growth of the
// per-level supremum is what flags divergence.
//
// Two layouts:
//  * pole grids approach a finite endpoint b from below, each level halving
//    the remaining gap b - x;
//  * cap grids are geometric on [lo, cap], each level doubling the cap
//    (used when the exponent range is unbounded).
struct LeveledGrid {
    std::vector<double> points;              // ascending
    std::vector<std::size_t> level_offsets;  // points[0 .. offsets[k]) = levels 0..k

    std::size_t levels() const { return level_offsets.size(); }
    std::size_t size() const { return points.size(); }
};

struct PoleGridOptions {
    std::size_t points_per_level = 40;
    std::size_t levels = 3;
    double first_gap = 8e-3;  // b - x reached by level 0 (scaled by b - lo)
    double gap_ratio = 0.5;   // gap shrink factor per level
};

struct CapGridOptions {
    std::size_t points_per_level = 40;
    std::size_t levels = 3;
    double first_cap = 250.0; // level 0 endpoint
    double cap_ratio = 2.0;   // cap growth per level
};

// Grid on [lo, b) accumulating towards the pole b.  Level k ends at
// b - first_gap * gap_ratio^k * (b - lo); points are geometric in b - x.
LeveledGrid make_pole_grid(double lo, double b, const PoleGridOptions& opt = {});

// Geometric grid on [lo, first_cap * cap_ratio^k], one level per cap.
LeveledGrid make_cap_grid(double lo, const CapGridOptions& opt = {});

// Single-level grid over [lo, hi] (inclusive), geometric spacing.
LeveledGrid make_closed_grid(double lo, double hi, std::size_t n);

} // namespace tailnorm
