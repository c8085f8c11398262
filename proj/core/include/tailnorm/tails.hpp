#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tailnorm/errors.hpp"
#include "tailnorm/estimates.hpp"
#include "tailnorm/json_io.hpp"

// Tail (survival-type) functions T(x) = P(|X| >= x) of the distribution
// families the harness works with, clamped to 1 on [0, x0].  All evaluation
// goes through the log form so far tails never underflow.

namespace tailnorm {

enum class TailFamily {
    power_log,       // x^{-b} (ln x)^g           beyond x0 >= e
    exp_poly,        // C x^g e^{-b x}            beyond x0
    weibull,         // exp(-c x^m)
    log_power,       // exp(-k ln(x+1)^{1+1/beta})
    subgaussian,     // exp(-x^2/2)
    pure_power,      // min(1, x^{-r})
    gen_weibull_log, // exp(-(c/q) x^q ln(e+x^{q-1})^{-a(q-1)}), q = m/(m-1)
    custom,
};

const char* tail_family_name(TailFamily f);

class TailFunction {
public:
    // Clamped survival value in [0, 1]; 1 on [0, x0].
    double operator()(double x) const;
    // ln of the above; exact in the far tail.
    double log_eval(double x) const;
    // ln T(e^y): the formulas are stored against y = ln x, so arguments far
    // beyond double range (near-pole moment integrals) stay evaluable.
    double log_eval_ln(double y) const;

    TailFamily family() const { return family_; }
    const std::string& name() const { return name_; }
    double x0() const { return x0_; }
    // Parameters in canonical order (empty for custom tails).
    const std::vector<std::pair<std::string, double>>& params() const { return params_; }

    // Supremum of p with E|X|^p finite (+inf when all moments exist).
    double moment_critical_p() const { return moment_critical_p_; }
    // Supremum of l with E exp(l|X|) finite (0 when no exponential moment).
    double mgf_critical_lambda() const { return mgf_critical_lambda_; }

    // Tail of c*|X|, i.e. x -> T(x/c).  c > 0.
    TailFunction scaled(double c) const;

    // Smallest x with T(x) <= q (q in (0,1)); used to size evaluation grids.
    double quantile_below(double q) const;

    // -- factories ---------------------------------------------------------
    static TailFunction power_log(double b, double gamma);
    static TailFunction exp_poly(double b, double gamma);
    static TailFunction exp_poly(double b, double gamma, double C, double x0_hint = 0.0);
    static TailFunction weibull(double c, double m);
    static TailFunction log_power(double k, double beta);
    static TailFunction subgaussian();
    static TailFunction pure_power(double r);
    static TailFunction gen_weibull_log(double c, double m, double a);
    // log_tail must be nonincreasing with log_tail <= 0 beyond x0.  The
    // x-argument form is convenient but capped at x < 1e308; tails probed
    // far beyond that (counterexample grids near a moment pole) should use
    // the ln-argument form.
    static TailFunction custom(std::string name,
                               std::function<double(double)> log_tail,
                               double x0,
                               double moment_critical_p,
                               double mgf_critical_lambda);
    static TailFunction custom_ln(std::string name,
                                  std::function<double(double)> log_tail_of_ln_x,
                                  double x0,
                                  double moment_critical_p,
                                  double mgf_critical_lambda);

    JsonValue to_json() const;

private:
    TailFunction() = default;
    void validate_shape() const; // dense-sample monotonicity / range check
    void set_x0(double x0);

    TailFamily family_ = TailFamily::custom;
    std::string name_;
    std::vector<std::pair<std::string, double>> params_;
    std::function<double(double)> log_raw_ln_; // unclamped ln T as a function of ln x
    double x0_ = 0.0;
    double lx0_ = 0.0; // ln x0, -inf when x0 = 0
    double moment_critical_p_ = 0.0;
    double mgf_critical_lambda_ = 0.0;
};

// Generic factory keyed by family tag (the serialization entry point).
// Parameter keys per family:
//   power-log: b, gamma          exp-poly: b, gamma, [C]
//   weibull: c, m                log-power: k, beta
//   subgaussian: (none)          pure-power: r
//   gen-weibull-log: c, m, a
// An explicit x0 overrides the automatic clamping point where legal.
TailFunction make_tail(const std::string& family,
                       const std::vector<std::pair<std::string, double>>& params,
                       double x0_override = -1.0);

// Parse the JSON form {"family": ..., "params": {...}, "x0": ...}.
TailFunction tail_from_json(const std::string& text);

struct LorentzOptions {
    std::size_t points = 200;         // per level, doubled each level
    std::size_t levels = 3;
    double growth_threshold = 1.005;  // persistent per-level growth => diverged
    double tail_floor = 1e-12;        // base grid extends until both tails fall below
};

// sup_x T(x) / S(x), computed in log space over a refined geometric grid.
// The grid starts at 0 and extends past the point where both inputs are
// below tail_floor; each refinement doubles both the density and the reach,
// so suprema escaping to infinity show up as trace growth.
NormEstimate lorentz_quasinorm(const TailFunction& tail, const TailFunction& bound,
                               const LorentzOptions& opt = {});

} // namespace tailnorm
