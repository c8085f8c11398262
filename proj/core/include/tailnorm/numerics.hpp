#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "tailnorm/errors.hpp"

// Low-level numeric kernels shared by the norm and bound computations:
// half-line quadrature (linear and log-space), concave maximization,
// bisection, log-log slope fitting and a gamma function.  All routines are
// pure functions; they hold no global state and are safe to call from
// multiple threads.

namespace tailnorm {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct QuadratureSpec {
    double rel_tol = 1e-11;        // target relative error of the integral
    double abs_tol = 1e-300;       // floor for near-zero integrals
    double tail_threshold = 1e-13; // stop once panels fall below this share of the total
    int max_refinements = 24;      // per-panel composite doubling budget
    int max_panels = 200;

    void validate() const;
};

struct IntegralResult {
    double value = 0.0;
    double error = 0.0; // estimated absolute error
};

struct LogIntegralResult {
    double log_value = -inf; // log of the integral
    double rel_error = 0.0;  // estimated relative error of the (linear) integral
};

// Integral of f over [lower, inf).  f must be finite and eventually decaying;
// panels grow geometrically from `scale_hint` (auto-detected when <= 0) and
// integration stops when consecutive panels contribute less than
// tail_threshold * running total.
IntegralResult integrate_halfline(const std::function<double(double)>& f,
                                  const QuadratureSpec& spec = {},
                                  double scale_hint = 0.0,
                                  double lower = 0.0);

// Same contract, but the integrand is supplied and accumulated in log space:
// log_f(x) = ln f(x) with f > 0 (use -inf where f vanishes).  Required
// whenever the integrand spans more orders of magnitude than a double holds,
// e.g. x^(p-1) tails at large p.
LogIntegralResult log_integrate_halfline(const std::function<double(double)>& log_f,
                                         const QuadratureSpec& spec = {},
                                         double scale_hint = 0.0,
                                         double lower = 0.0);

// Log-space integral over [lower, inf) for a unimodal log-integrand.  The
// mode is located first and panels grow outward from it, so narrow peaks far
// from the origin (x^(p-1) tails at p ~ 1000) cost thousands, not millions,
// of evaluations.
LogIntegralResult log_integrate_peaked(const std::function<double(double)>& log_f,
                                       const QuadratureSpec& spec = {},
                                       double lower = 0.0);

struct MaxResult {
    double arg = 0.0;
    double value = 0.0;
    bool on_boundary = false; // supremum attained at a domain endpoint
};

// Maximize a concave g over [lo, hi] (hi may be +inf: the bracket expands
// geometrically until g decays).  Golden-section to a relative argument
// tolerance of ~1e-12; NaN from g is an input error.  An unbounded supremum
// is reported as {arg=inf, value=inf, on_boundary=true}.
MaxResult maximize_concave(const std::function<double(double)>& g,
                           double lo, double hi,
                           double arg_tol_rel = 1e-12);

// Root of a continuous f with f(lo), f(hi) of opposite sign.
double bisect_root(const std::function<double(double)>& f,
                   double lo, double hi, double x_tol_rel = 1e-13);

// Smallest x in [lo, hi] with pred(x) true, for a predicate that is false
// then true as x grows.  Requires pred(hi); returns the certified (true)
// end of the final bracket.
double bisect_increasing_predicate(const std::function<bool(double)>& pred,
                                   double lo, double hi, double x_tol_rel = 1e-6);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::size_t n = 0;
};

// Least-squares line through (ln u_i, ln v_i).  Requires >= 4 points,
// strictly positive and strictly monotone u.
SlopeFit fit_loglog_slope(std::span<const double> u, std::span<const double> v);

// Least-squares line through already-logged samples (x_i, y_i).
SlopeFit fit_line(std::span<const double> x, std::span<const double> y);

// Gamma function, Lanczos approximation (g = 7, 9 terms).  Relative error
// below 1e-12 on [0.5, 50]; arguments in (0, 0.5) go through the recurrence.
double gamma_fn(double x);
double log_gamma_fn(double x);

// log(exp(a) + exp(b)) without overflow; -inf inputs behave as zeros.
double log_sum_exp(double a, double b);

// n points geometric between lo and hi inclusive (lo, hi > 0).
std::vector<double> geometric_points(double lo, double hi, std::size_t n);

// n points uniform between lo and hi inclusive.
std::vector<double> linear_points(double lo, double hi, std::size_t n);

} // namespace tailnorm
