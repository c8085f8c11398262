#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailnorm/grids.hpp"
#include "tailnorm/numerics.hpp"
#include "tailnorm/tails.hpp"

namespace tailnorm {

// p-th norm of the variable behind a tail function, through the survival
// representation E|xi|^p = x0^p + p * integral_{x0}^inf x^{p-1} T(x) dx,
// evaluated in log space.  Throws divergence_error at or past the critical
// exponent and input_error within 1e-3 of it (quadrature error estimates
// are not trustworthy that close to the pole).
double moment(const TailFunction& tail, double p,
              const QuadratureSpec& spec = {});

// moment() plus its relative quadrature error estimate
struct MomentPoint {
    double value = 0.0;
    double rel_error = 0.0;
};
MomentPoint moment_with_error(const TailFunction& tail, double p,
                              const QuadratureSpec& spec = {});

struct MomentCurve {
    std::vector<double> p;
    std::vector<double> value;
    std::vector<double> rel_error;
    std::vector<std::size_t> level_offsets; // nonempty when built from a LeveledGrid
    std::string csv() const;                // columns: p, moment, err
};

// The curve p -> |xi|_p is the natural psi-function of the variable.
MomentCurve natural_psi(const TailFunction& tail, const std::vector<double>& p_grid,
                        const QuadratureSpec& spec = {});
MomentCurve natural_psi(const TailFunction& tail, const LeveledGrid& p_grid,
                        const QuadratureSpec& spec = {});

// E cosh(lambda*|zeta|) for the symmetrized variable; even in lambda and
// exactly 1 at lambda = 0.  log_value stays finite when value overflows.
struct MgfValue {
    double value = 1.0;
    double log_value = 0.0;
    bool diverged = false;
    double critical = inf; // smallest |lambda| with a divergent integral
};
MgfValue mgf(const TailFunction& tail, double lambda,
             const QuadratureSpec& spec = {});

// Largest grid mu with T(y) <= exp(-mu*y) on a dense check grid.  The
// witness reports a violating y for the largest candidate when none holds.
struct CramerResult {
    bool satisfied = false;
    double mu = 0.0;
    std::optional<double> witness;
};
CramerResult cramer_check(const TailFunction& tail, const std::vector<double>& mu_grid);

} // namespace tailnorm
