#include "tailnorm/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "tailnorm/bphi.hpp"
#include "tailnorm/gls.hpp"
#include "tailnorm/grids.hpp"
#include "tailnorm/moments.hpp"
#include "tailnorm/tails.hpp"

namespace tailnorm {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double param_or(const std::vector<std::pair<std::string, double>>& params,
                const std::string& key, double fallback) {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    return fallback;
}

void reject_unknown(const std::vector<std::pair<std::string, double>>& params,
                    std::set<std::string> allowed, const std::string& scenario) {
    for (const auto& [k, v] : params)
        if (!allowed.count(k))
            throw input_error("unknown parameter '" + k + "' for scenario " + scenario);
}

std::string space_label(const std::string& kind, const std::string& family,
                        const std::vector<std::pair<std::string, double>>& params) {
    std::string out = kind + ":" + family;
    char sep = '[';
    for (const auto& [k, v] : params) {
        out += sep;
        out += k + "=" + fmt(v);
        sep = ',';
    }
    if (sep == ',') out += ']';
    return out;
}

// fit over the middle of the curve: the first trim_far fraction has not
// reached the asymptotic regime, the last trim_near fraction carries the
// largest evaluation error
SlopeFit trimmed_fit(const std::vector<double>& x, const std::vector<double>& y,
                     const CounterexampleOptions& opt) {
    std::size_t n = x.size();
    auto lo = static_cast<std::size_t>(std::floor(n * opt.trim_far));
    auto hi = n - static_cast<std::size_t>(std::floor(n * opt.trim_near));
    if (hi - lo < 8) throw input_error("fewer than 8 grid points left after trimming");
    std::vector<double> xs(x.begin() + lo, x.begin() + hi);
    std::vector<double> ys(y.begin() + lo, y.begin() + hi);
    return fit_line(xs, ys);
}

ExponentCheck exponent_check(std::string name, SlopeFit fit, double expected,
                             double tolerance, std::string from,
                             const CounterexampleOptions& opt) {
    ExponentCheck c;
    c.name = std::move(name);
    c.fit = fit;
    c.expected = expected;
    c.tolerance = tolerance;
    c.expected_from = std::move(from);
    if (!(fit.residual_rms <= opt.residual_threshold))
        c.verdict = "inconclusive";
    else if (std::abs(fit.slope - expected) <= tolerance * std::abs(expected))
        c.verdict = "pass";
    else
        c.verdict = "fail";
    return c;
}

MembershipCheck membership_check(std::string space, const NormEstimate& est,
                                 bool expect_diverged) {
    MembershipCheck m;
    m.space = std::move(space);
    m.verdict = est.diverged ? "diverged" : "finite";
    m.expected = expect_diverged ? "diverged" : "finite";
    m.value = est.value;
    m.pass = est.diverged == expect_diverged;
    return m;
}

// how far d stays from a constant, reported as the half-range around the
// fitted (midrange) level
AssertionCheck band_check(std::string name, const std::vector<double>& d,
                          double allowance, const std::string& window) {
    double mn = inf, mx = -inf;
    for (double v : d) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    AssertionCheck a;
    a.name = std::move(name);
    double half = 0.5 * (mx - mn);
    a.pass = std::isfinite(half) && half <= allowance;
    a.detail = "log deviation half-range " + fmt(half) + " (allowed " + fmt(allowance) +
               "), fitted constant " + fmt(0.5 * (mx + mn)) + ", window " + window;
    return a;
}

void finalize(CounterexampleReport& rep) {
    bool ok = true;
    for (const auto& e : rep.exponents) ok = ok && e.verdict == "pass";
    for (const auto& m : rep.memberships) ok = ok && m.pass;
    for (const auto& a : rep.assertions) ok = ok && a.pass;
    rep.all_pass = ok;
}

double scenario_tolerance(const CounterexampleOptions& opt, double fallback) {
    return opt.exponent_tolerance > 0.0 ? opt.exponent_tolerance : fallback;
}

PoleGridOptions pole_opts(const CounterexampleOptions& opt) {
    PoleGridOptions g;
    g.points_per_level = opt.points_per_level;
    return g;
}

CapGridOptions cap_opts(const CounterexampleOptions& opt) {
    CapGridOptions g;
    g.points_per_level = opt.points_per_level;
    return g;
}

} // namespace

CounterexampleReport run_counterexample_A(double b, double gamma,
                                          const CounterexampleOptions& opt) {
    if (!(b > 1.0) || !(b <= 10.0)) throw input_error("scenario A needs b in (1, 10]");
    if (!(gamma > 0.0) || !(gamma <= 5.0))
        throw input_error("scenario A needs gamma in (0, 5]");

    CounterexampleReport rep;
    rep.scenario = "A";
    rep.parameters = {{"b", b}, {"gamma", gamma}};
    double tol = scenario_tolerance(opt, 0.05);

    // Levels end at the same absolute gaps b - p for every b.  The ratio
    // |zeta|_p / psi(p) blows up like (b-p)^{-1/b}, so the per-level growth
    // the divergence detector sees is (1/0.65)^{1/b}, about 9% per level at
    // b = 5; the deepest gap stays above the near-critical moment refusal.
    PoleGridOptions gopt;
    gopt.points_per_level = opt.points_per_level;
    gopt.first_gap = 3.85e-3 / (b - 1.0);
    gopt.gap_ratio = 0.65;
    auto grid = make_pole_grid(1.0, b, gopt);
    auto tail = TailFunction::power_log(b, gamma);
    auto curve = natural_psi(tail, grid, opt.quadrature);

    // moment growth toward the pole: |zeta|_p against (b - p) in log-log
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < curve.p.size(); ++i) {
        lx.push_back(std::log(b - curve.p[i]));
        ly.push_back(std::log(curve.value[i]));
    }
    rep.exponents.push_back(exponent_check("moment-growth", trimmed_fit(lx, ly, opt),
                                           -(gamma + 1.0) / b, tol, "-(gamma+1)/b", opt));
    rep.curves.push_back({"moment-growth", "ln(b-p)", "ln moment", lx, ly});

    // membership straddle: the same-gamma space rejects the variable, one
    // extra log power admits it
    auto psi_lo = PsiFunction::grand(b, gamma);
    auto psi_hi = PsiFunction::grand(b, gamma + 1.0);
    rep.memberships.push_back(membership_check(space_label("gls", psi_lo.name(), psi_lo.params()),
                                               gls_norm(curve, psi_lo), true));
    rep.memberships.push_back(membership_check(space_label("gls", psi_hi.name(), psi_hi.params()),
                                               gls_norm(curve, psi_hi), false));

    // control with no pole at all: the constant weight on [1, 2] measures
    // the plain second moment of an exponential variable
    auto flat = PsiFunction::flat(2.0);
    auto ctrl = natural_psi(TailFunction::weibull(1.0, 1.0), default_psi_grid(flat),
                            opt.quadrature);
    rep.memberships.push_back(membership_check(
        space_label("gls", flat.name(), flat.params()) + " control", gls_norm(ctrl, flat), false));

    // forward direction: the tail bound of a unit-norm variable follows
    // x^{-b} (ln x)^gamma up to a constant
    auto bound = gls_tail_bound(psi_lo, 1.0, grid);
    double eps_min = grid.points.empty() ? 1e-3 : b - grid.points.back();
    double y_lo = std::max(2.0, gamma / (0.3 * (b - 1.0)));
    double y_hi = std::max(y_lo + 1.0, std::min(40.0, 0.5 * gamma / eps_min));
    auto ys = linear_points(y_lo, y_hi, 150);
    std::vector<double> dev;
    for (double y : ys) dev.push_back(bound.log_eval_ln(y) + b * y - gamma * std::log(y));
    rep.assertions.push_back(band_check("unit-ball-tail-shape", dev, opt.domination_band,
                                        "ln x in [" + fmt(y_lo) + ", " + fmt(y_hi) + "]"));
    rep.curves.push_back({"unit-ball-tail-shape", "ln x", "shape deviation", ys, dev});

    finalize(rep);
    return rep;
}

CounterexampleReport run_counterexample_B(double b, double gamma,
                                          const CounterexampleOptions& opt) {
    if (!(b > 1.0) || !(b <= 10.0)) throw input_error("scenario B needs b in (1, 10]");
    if (!(gamma > 0.0) || !(gamma <= 5.0))
        throw input_error("scenario B needs gamma in (0, 5]");

    CounterexampleReport rep;
    rep.scenario = "B";
    rep.parameters = {{"b", b}, {"gamma", gamma}};
    double tol = scenario_tolerance(opt, 0.05);

    auto tail = TailFunction::exp_poly(b, gamma);
    auto lam_grid = make_pole_grid(1.0, b, pole_opts(opt));

    // MGF pole order: ln E cosh(lambda zeta) against (b - lambda) in log-log
    std::vector<double> lx, ly;
    for (double l : lam_grid.points) {
        lx.push_back(std::log(b - l));
        ly.push_back(mgf(tail, l, opt.quadrature).log_value);
    }
    rep.exponents.push_back(exponent_check("mgf-pole-order", trimmed_fit(lx, ly, opt),
                                           -(gamma + 1.0), tol, "-(gamma+1)", opt));
    rep.curves.push_back({"mgf-pole-order", "ln(b-lambda)", "ln mgf", lx, ly});

    // the weight's pole has order gamma, one less than the MGF demands
    auto phi = PhiFunction::log_pole(b, gamma);
    auto norm_grid = make_pole_grid(1e-3, b, pole_opts(opt));
    rep.memberships.push_back(
        membership_check(space_label("bphi", phi.name(), phi.params()),
                         bphi_norm(tail, phi, norm_grid.points, {1e6, 1e-4, opt.quadrature}),
                         true));

    // control: a gaussian-type tail against the quadratic weight stays finite
    auto quad = PhiFunction::quadratic();
    rep.memberships.push_back(membership_check(
        space_label("bphi", quad.name(), quad.params()) + " control",
        bphi_norm(TailFunction::weibull(0.5, 2.0), quad, {1e6, 1e-4, opt.quadrature}), false));

    // forward direction: the unit-ball tail bound is exactly
    // C x^gamma e^{-bx} beyond the conjugate junction
    auto bound = bphi_tail_bound(phi, 1.0);
    double xj = phi.second_deriv0() * phi.formula_start();
    auto xs = geometric_points(1.2 * xj, 36.0 * xj, 120);
    std::vector<double> dev;
    for (double x : xs) dev.push_back(bound.log_eval(x) + b * x - gamma * std::log(x));
    rep.assertions.push_back(band_check("unit-ball-tail-shape", dev, opt.domination_band,
                                        "x in [" + fmt(1.2 * xj) + ", " + fmt(36.0 * xj) + "]"));
    rep.curves.push_back({"unit-ball-tail-shape", "x", "shape deviation", xs, dev});

    finalize(rep);
    return rep;
}

namespace {

CounterexampleReport example_weibull(const std::vector<std::pair<std::string, double>>& params,
                                     const CounterexampleOptions& opt) {
    double m = param_or(params, "m", 2.0);
    double c3 = param_or(params, "C3", 0.5);
    reject_unknown(params, {"m", "C3"}, "example3");
    if (!(m > 0.0) || !(m <= 6.0)) throw input_error("example 3 needs m in (0, 6]");
    if (!(c3 > 0.0) || !std::isfinite(c3)) throw input_error("example 3 needs C3 > 0");

    CounterexampleReport rep;
    rep.scenario = "example3";
    rep.parameters = {{"m", m}, {"C3", c3}};
    double tol = scenario_tolerance(opt, 0.05);

    auto tail = TailFunction::weibull(c3, m);
    auto grid = make_cap_grid(1.0, cap_opts(opt));
    auto curve = natural_psi(tail, grid, opt.quadrature);

    // natural psi of the stretched-exponential tail grows like p^{1/m}, but
    // the Stirling regime needs p/m large: fit only past the first cap level
    std::size_t start =
        curve.level_offsets.size() >= 2 ? curve.level_offsets.front() : 0;
    std::vector<double> lx, ly;
    for (std::size_t i = start; i < curve.p.size(); ++i) {
        lx.push_back(std::log(curve.p[i]));
        ly.push_back(std::log(curve.value[i]));
    }
    rep.exponents.push_back(
        exponent_check("natural-psi-slope", fit_line(lx, ly), 1.0 / m, tol, "1/m", opt));
    rep.curves.push_back({"natural-psi-slope", "ln p", "ln moment", lx, ly});

    // converse: the unit-ball tail bound of the p^{1/m} space decays like a
    // Weibull tail of the same order
    auto psi = PsiFunction::power(m);
    auto bound = gls_tail_bound(psi, 1.0, grid);
    double cap = grid.points.empty() ? 1000.0 : grid.points.back();
    double y_lo = (std::log(3.0) + 1.0) / m;
    double y_hi = (std::log(0.8 * cap) + 1.0) / m;
    std::vector<double> by, bv;
    for (double y : linear_points(y_lo, y_hi, 80)) {
        by.push_back(y);
        bv.push_back(std::log(-bound.log_eval_ln(y)));
    }
    rep.exponents.push_back(
        exponent_check("unit-ball-weibull-order", fit_line(by, bv), m, tol, "m", opt));
    rep.curves.push_back({"unit-ball-weibull-order", "ln x", "ln(-ln bound)", by, bv});

    rep.memberships.push_back(membership_check(space_label("gls", psi.name(), psi.params()),
                                               gls_norm(curve, psi), false));
    // a heavier tail of half the order escapes the same space
    auto heavier = natural_psi(TailFunction::weibull(c3, 0.5 * m), grid, opt.quadrature);
    rep.memberships.push_back(
        membership_check(space_label("gls", psi.name(), psi.params()) + " vs heavier tail",
                         gls_norm(heavier, psi), true));

    finalize(rep);
    return rep;
}

CounterexampleReport example_log_power(const std::vector<std::pair<std::string, double>>& params,
                                       const CounterexampleOptions& opt) {
    double k = param_or(params, "K", 1.0);
    double beta = param_or(params, "beta", 1.0);
    reject_unknown(params, {"K", "beta"}, "example2");
    if (!(k > 0.0) || !std::isfinite(k)) throw input_error("example 2 needs K > 0");
    if (!(beta > 0.0) || !(beta <= 3.0)) throw input_error("example 2 needs beta in (0, 3]");

    CounterexampleReport rep;
    rep.scenario = "example2";
    rep.parameters = {{"K", k}, {"beta", beta}};
    // the double-log fit converges slower than the plain ones
    double tol = scenario_tolerance(opt, 0.10);

    auto tail = TailFunction::log_power(k, beta);
    auto grid = make_cap_grid(1.0, cap_opts(opt));
    auto curve = natural_psi(tail, grid, opt.quadrature);

    // ln |xi|_p grows like a power of p: fit ln ln |xi|_p against ln p
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < curve.p.size(); ++i) {
        if (!(curve.value[i] > 1.0)) continue;
        lx.push_back(std::log(curve.p[i]));
        ly.push_back(std::log(std::log(curve.value[i])));
    }
    rep.exponents.push_back(
        exponent_check("log-moment-power", trimmed_fit(lx, ly, opt), beta, tol, "beta", opt));
    rep.curves.push_back({"log-moment-power", "ln p", "ln ln moment", lx, ly});

    // the variable sits in the union over C of the exp(C p^beta) spaces:
    // twice the natural constant admits it, half of it does not
    double cstar = std::pow(beta / (k * (beta + 1.0)), beta) / (beta + 1.0);
    auto psi_in = PsiFunction::exp_power(2.0 * cstar, beta);
    auto psi_out = PsiFunction::exp_power(0.5 * cstar, beta);
    rep.memberships.push_back(membership_check(
        space_label("gls", psi_in.name(), psi_in.params()), gls_norm(curve, psi_in), false));
    rep.memberships.push_back(membership_check(
        space_label("gls", psi_out.name(), psi_out.params()), gls_norm(curve, psi_out), true));

    // no exponential decay rate exists for this tail, unlike a true
    // exponential one
    auto mu_grid = geometric_points(1e-3, 4.0, 25);
    auto cr = cramer_check(tail, mu_grid);
    AssertionCheck a1;
    a1.name = "no-exponential-rate";
    a1.pass = !cr.satisfied;
    a1.detail = cr.satisfied ? "unexpected verified rate mu = " + fmt(cr.mu)
                             : "no candidate rate verified, witness x = " +
                                   (cr.witness ? fmt(*cr.witness) : std::string("none"));
    rep.assertions.push_back(a1);
    auto cr2 = cramer_check(TailFunction::weibull(1.0, 1.0), mu_grid);
    AssertionCheck a2;
    a2.name = "exponential-control-has-rate";
    a2.pass = cr2.satisfied;
    a2.detail = cr2.satisfied ? "verified rate mu = " + fmt(cr2.mu) : "control rate missing";
    rep.assertions.push_back(a2);

    finalize(rep);
    return rep;
}

CounterexampleReport example_orlicz_pair(const std::vector<std::pair<std::string, double>>& params,
                                         const CounterexampleOptions& opt) {
    double m = param_or(params, "m", 2.0);
    double a = param_or(params, "a", 0.0);
    double c = param_or(params, "c", 1.0);
    reject_unknown(params, {"m", "a", "c"}, "example1");
    if (!(m >= 2.0) || !(m <= 6.0))
        throw input_error("example 1 needs m in [2, 6] (the weight keeps a convex "
                          "quadratic extension only from 2 on)");
    if (!(a >= 0.0) || !(a <= 3.0)) throw input_error("example 1 needs a in [0, 3]");
    if (!(c > 0.0) || !std::isfinite(c)) throw input_error("example 1 needs c > 0");

    CounterexampleReport rep;
    rep.scenario = "example1";
    rep.parameters = {{"m", m}, {"a", a}, {"c", c}};
    double tol = scenario_tolerance(opt, 0.05);
    double q = m / (m - 1.0);

    auto phi = PhiFunction::power_log(m, a);
    auto tail = TailFunction::gen_weibull_log(c, m, a);

    rep.memberships.push_back(
        membership_check(space_label("bphi", phi.name(), phi.params()),
                         bphi_norm(tail, phi, {1e6, 1e-4, opt.quadrature}), false));
    // an exponential tail has too heavy an MGF for any of these weights
    rep.memberships.push_back(membership_check(
        space_label("bphi", phi.name(), phi.params()) + " vs exponential tail",
        bphi_norm(TailFunction::weibull(1.0, 1.0), phi, {1e6, 1e-4, opt.quadrature}), true));

    // the unit-ball tail bound carries the conjugate exponent q = m/(m-1)
    // with the inverted slowly varying factor
    auto bound = bphi_tail_bound(phi, 1.0);
    auto xs = geometric_points(2.0, 100.0, 120);
    std::vector<double> dev;
    for (double x : xs) {
        double model = q * std::log(x) -
                       a * (q - 1.0) * std::log(std::log(std::numbers::e +
                                                         std::pow(x, q - 1.0)));
        dev.push_back(std::log(-bound.log_eval(x)) - model);
    }
    rep.assertions.push_back(band_check("unit-ball-tail-shape", dev, opt.domination_band,
                                        "x in [2, 100]"));
    rep.curves.push_back({"unit-ball-tail-shape", "x", "shape deviation", xs, dev});

    if (a == 0.0) {
        // no slowly varying factor: the decay order is exactly q
        std::vector<double> lx, lv;
        for (double x : geometric_points(2.0, 100.0, 60)) {
            lx.push_back(std::log(x));
            lv.push_back(std::log(-bound.log_eval(x)));
        }
        rep.exponents.push_back(
            exponent_check("unit-ball-decay-order", fit_line(lx, lv), q, tol, "m/(m-1)", opt));
        rep.curves.push_back({"unit-ball-decay-order", "ln x", "ln(-ln bound)", lx, lv});
    }

    finalize(rep);
    return rep;
}

} // namespace

CounterexampleReport run_example_equivalences(
    int which, const std::vector<std::pair<std::string, double>>& params,
    const CounterexampleOptions& opt) {
    switch (which) {
        case 1: return example_orlicz_pair(params, opt);
        case 2: return example_log_power(params, opt);
        case 3: return example_weibull(params, opt);
        default: throw input_error("example id must be 1, 2, or 3");
    }
}

JsonValue CounterexampleReport::to_json() const {
    JsonValue out = JsonValue::object();
    out.set("scenario", scenario);
    JsonValue pars = JsonValue::object();
    for (const auto& [k, v] : parameters) pars.set(k, JsonValue(v));
    out.set("parameters", std::move(pars));

    JsonValue exps = JsonValue::array();
    for (const auto& e : exponents) {
        JsonValue j = JsonValue::object();
        j.set("name", e.name);
        j.set("slope", JsonValue(e.fit.slope));
        j.set("intercept", JsonValue(e.fit.intercept));
        j.set("residual_rms", JsonValue(e.fit.residual_rms));
        j.set("points", JsonValue(e.fit.n));
        j.set("expected", JsonValue(e.expected));
        j.set("tolerance", JsonValue(e.tolerance));
        j.set("expected_from", e.expected_from);
        j.set("verdict", e.verdict);
        exps.push(std::move(j));
    }
    out.set("exponents", std::move(exps));

    JsonValue mems = JsonValue::array();
    for (const auto& m : memberships) {
        JsonValue j = JsonValue::object();
        j.set("space", m.space);
        j.set("verdict", m.verdict);
        j.set("expected", m.expected);
        j.set("value", JsonValue(m.value));
        j.set("pass", JsonValue(m.pass));
        mems.push(std::move(j));
    }
    out.set("memberships", std::move(mems));

    JsonValue asses = JsonValue::array();
    for (const auto& a : assertions) {
        JsonValue j = JsonValue::object();
        j.set("name", a.name);
        j.set("pass", JsonValue(a.pass));
        j.set("detail", a.detail);
        asses.push(std::move(j));
    }
    out.set("assertions", std::move(asses));
    out.set("all_pass", JsonValue(all_pass));
    return out;
}

} // namespace tailnorm
