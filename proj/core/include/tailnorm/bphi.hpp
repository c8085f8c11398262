#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tailnorm/conjugate.hpp"
#include "tailnorm/errors.hpp"
#include "tailnorm/estimates.hpp"
#include "tailnorm/grids.hpp"
#include "tailnorm/json_io.hpp"
#include "tailnorm/moments.hpp"
#include "tailnorm/tails.hpp"

// Exponential-moment machinery: the weight families phi(lambda), the norm
// inf { tau : E exp(lambda xi) <= exp(phi(lambda tau)) }, the Chernoff tail
// bound exp(-phi*(x/K)), the natural phi of a tail family, the Orlicz
// N-function, and the Z-integral boundedness check behind the converse
// moment equivalence.

namespace tailnorm {

enum class PhiFamily {
    quadratic, // lambda^2/2 everywhere
    power,     // |lambda|^m/m beyond 1, quadratic below
    power_log, // |lambda|^m/m * (ln(e+|lambda|^m))^{a/q} beyond 1, quadratic below
    log_pole,  // gamma ln(b/(b-|lambda|)) beyond the tangency point, quadratic below
};

const char* phi_family_name(PhiFamily f);

class PhiFunction {
public:
    // Even, convex, 0 at 0 with zero slope.  Returns +inf at and beyond a
    // finite lambda0.  Below formula_start() every family runs on the
    // quadratic c lambda^2 that extends the formula branch convexly; the
    // log-pole family picks the tangency junction (value and slope match)
    // because a value-only splice at 1 would bend the wrong way.
    double operator()(double lambda) const;

    double lambda0() const { return lambda0_; }
    double second_deriv0() const { return 2.0 * c_; }
    double formula_start() const { return lambda_j_; }
    ConvexDomain domain() const { return {0.0, lambda0_, false}; }

    // Legendre transform phi*(x) = sup (lambda x - phi(lambda)) with the
    // maximizer.  Closed forms everywhere except power-log, which maximizes
    // numerically; the log-pole branch uses argmax = b - gamma/x, so there
    // is no differencing against the pole.
    ConjugatePoint conjugate_point(double x) const;
    double conjugate_at(double x) const { return conjugate_point(x).value; }

    PhiFamily family() const { return family_; }
    const std::string& name() const { return name_; }
    const std::vector<std::pair<std::string, double>>& params() const { return params_; }

    static PhiFunction quadratic();
    static PhiFunction power(double m);           // m >= 2
    static PhiFunction power_log(double m, double a); // m >= 2, a >= 0
    static PhiFunction log_pole(double b, double gamma); // b > 1, lambda0 = b

    JsonValue to_json() const;

private:
    PhiFunction() = default;
    void validate_shape() const; // sampled convexity / superlinearity check

    PhiFamily family_ = PhiFamily::quadratic;
    std::string name_;
    std::vector<std::pair<std::string, double>> params_;
    double lambda0_ = inf;
    double lambda_j_ = 0.0; // formula region start
    double c_ = 0.5;        // quadratic extension coefficient
};

// Factory keyed by family tag (the serialization entry point).
// Parameter keys: quadratic: none   power: m   power-log: m, a   log-pole: b, gamma
PhiFunction make_phi(const std::string& family,
                     const std::vector<std::pair<std::string, double>>& params);

// Parse the JSON form {"family": ..., "params": {...}}; a "lambda0" field is
// accepted and ignored (the family determines it).
PhiFunction phi_from_json(const std::string& text);

// ln E cosh(lambda |zeta|), either integrated from a tail or supplied in
// closed form.  The variance feeds the norm bisection bracket.
class MgfFunction {
public:
    MgfValue operator()(double lambda) const;
    double critical() const { return critical_; }
    double variance() const { return variance_; }
    const std::string& name() const { return name_; }

    static MgfFunction from_tail(const TailFunction& tail, const QuadratureSpec& spec = {});
    // log_mgf must be the symmetrized log-MGF: even, 0 at 0.  variance nan
    // means: recover it from the second difference at 0.
    static MgfFunction analytic(std::string name, std::function<double(double)> log_mgf,
                                double critical = inf, double variance = nan_value);

    static constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

private:
    MgfFunction() = default;

    std::string name_;
    std::function<MgfValue(double)> eval_;
    double critical_ = inf;
    double variance_ = 0.0;
};

// The lambda grid a phi family is naturally checked over: geometric toward
// a finite lambda0, geometric to the cap otherwise, reaching down to 1e-3
// so the small-lambda regime is represented.
std::vector<double> default_lambda_grid(const PhiFunction& phi);

struct BphiOptions {
    double tau_cap = 1e6;    // no feasible tau below this => diverged
    double rel_width = 1e-4; // bisection stops at this relative bracket width
    QuadratureSpec quadrature;
};

// inf over tau of "ln M(lambda) <= phi(lambda tau) for the whole grid".
// The domain condition is strict: a tau pushing any grid point past lambda0
// is infeasible, which is what lets pole-order mismatches diverge.  The
// bracket opens at sqrt(var/phi''(0)), the binding ratio as lambda -> 0;
// when that end is already feasible it is returned outright.  A divergent
// MGF at a grid point short-circuits to an infinite norm with the witness.
NormEstimate bphi_norm(const MgfFunction& mgf, const PhiFunction& phi,
                       const std::vector<double>& lambda_grid, const BphiOptions& opt = {});
NormEstimate bphi_norm(const MgfFunction& mgf, const PhiFunction& phi,
                       const BphiOptions& opt = {});
NormEstimate bphi_norm(const TailFunction& tail, const PhiFunction& phi,
                       const std::vector<double>& lambda_grid, const BphiOptions& opt = {});
NormEstimate bphi_norm(const TailFunction& tail, const PhiFunction& phi,
                       const BphiOptions& opt = {});

// The Chernoff bound min(1, exp(-phi*(x/K))).  Decays exponentially of
// order lambda0/K for pole families, faster than every exponential
// otherwise.
TailFunction bphi_tail_bound(const PhiFunction& phi, double K);

// phi_F(lambda) = max over the family of ln E cosh(lambda |zeta|), sampled
// on {0} + lambda_grid.  Tails without exponential decay (MGF critical 0)
// are refused by name; grid points where every MGF diverges come out +inf,
// which the convexity check of the sampled result tolerates as a tail.
SampledConvexFunction natural_phi(const std::vector<TailFunction>& tails,
                                  const std::vector<double>& lambda_grid,
                                  const QuadratureSpec& spec = {});

// N(u) = exp(phi*(u)) - 1 on the grid; 0 at 0, increasing, convex.
SampledConvexFunction n_function(const PhiFunction& phi, const std::vector<double>& u_grid);

struct ZConditionPoint {
    double lambda = 0.0;
    double theta = 0.0; // C1 / (lambda phi*'(lambda))
    double z_log = 0.0; // ln of Z(lambda) = integral of exp(-theta phi*(x))
    double c = 0.0;     // (phi*)^{-1}(ln Z)/lambda, the implied constant
    bool z_finite = true;
};

struct ZConditionReport {
    double c1 = 1.0;
    std::vector<ZConditionPoint> points;
    std::vector<double> trace; // per-level sup of c
    double c_sup = 0.0;
    bool bounded = false; // sup trace not persistently growing at the cap
};

struct ZConditionOptions {
    double growth_threshold = 1.05;
    QuadratureSpec quadrature;
};

// Evaluates the integral condition behind the converse moment bound on a
// leveled lambda grid in (e, lambda0).  Requires lambda0 = inf; pole
// families are not applicable.  The boundedness verdict is empirical: the
// per-level sup of c is flagged unbounded only if it keeps growing by the
// threshold factor at every refinement.
ZConditionReport z_condition_check(const PhiFunction& phi, double c1,
                                   const LeveledGrid& lambda_grid,
                                   const ZConditionOptions& opt = {});
ZConditionReport z_condition_check(const PhiFunction& phi, double c1 = 1.0);

} // namespace tailnorm
