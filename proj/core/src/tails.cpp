#include "tailnorm/tails.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <json.hpp>

#include "tailnorm/numerics.hpp"

namespace tailnorm {

namespace {

constexpr double euler_e = std::numbers::e;
constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double require_param(const std::vector<std::pair<std::string, double>>& params,
                     const std::string& key) {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    throw input_error("missing tail parameter '" + key + "'");
}

const double* find_param(const std::vector<std::pair<std::string, double>>& params,
                         const std::string& key) {
    for (const auto& [k, v] : params)
        if (k == key) return &v;
    return nullptr;
}

// Smallest y >= start with log_raw(y) <= 0, assuming log_raw is
// nonincreasing from start on.  This is where clamping may stop.
double descend_to_zero(const std::function<double(double)>& log_raw_ln, double start) {
    if (log_raw_ln(start) <= 0.0) return start;
    double hi = start + 1.0;
    int guard = 0;
    while (log_raw_ln(hi) > 0.0) {
        hi += hi - start + 1.0;
        if (++guard > 600) throw input_error("tail formula never drops below 1");
    }
    return bisect_root([&](double y) { return log_raw_ln(y); }, start, hi, 1e-14);
}

} // namespace

const char* tail_family_name(TailFamily f) {
    switch (f) {
        case TailFamily::power_log: return "power-log";
        case TailFamily::exp_poly: return "exp-poly";
        case TailFamily::weibull: return "weibull";
        case TailFamily::log_power: return "log-power";
        case TailFamily::subgaussian: return "subgaussian";
        case TailFamily::pure_power: return "pure-power";
        case TailFamily::gen_weibull_log: return "gen-weibull-log";
        case TailFamily::custom: return "custom";
    }
    return "custom";
}

double TailFunction::operator()(double x) const { return std::exp(log_eval(x)); }

double TailFunction::log_eval(double x) const {
    if (std::isnan(x) || x < 0) throw input_error("tail argument must be >= 0");
    if (x <= x0_ || x == 0.0) return 0.0;
    return log_eval_ln(std::log(x));
}

double TailFunction::log_eval_ln(double y) const {
    if (std::isnan(y)) throw input_error("tail log-argument is NaN");
    if (y <= lx0_) return 0.0;
    double v = log_raw_ln_(y);
    if (std::isnan(v)) throw input_error("tail formula returned NaN for " + name_);
    return std::min(0.0, v);
}

void TailFunction::validate_shape() const {
    double lo = x0_ > 0 ? x0_ * (1.0 + 1e-12) : 1e-9;
    double hi = (x0_ + 1.0) * 1e8;
    double prev = 1e300;
    for (double x : geometric_points(lo, hi, 400)) {
        double le = log_eval(x);
        if (le > prev + 1e-9)
            throw construction_error("tail '" + name_ + "' is not nonincreasing near x=" +
                                     std::to_string(x));
        prev = le;
    }
}

void TailFunction::set_x0(double x0) {
    x0_ = x0;
    lx0_ = x0 > 0 ? std::log(x0) : neg_inf;
}

TailFunction TailFunction::power_log(double b, double gamma) {
    if (!(b > 1.0) || !(gamma >= 0.0) || !std::isfinite(b) || !std::isfinite(gamma))
        throw input_error("power-log tail requires b > 1 and gamma >= 0");
    TailFunction t;
    t.family_ = TailFamily::power_log;
    t.name_ = "power-log";
    t.params_ = {{"b", b}, {"gamma", gamma}};
    t.log_raw_ln_ = [b, gamma](double y) { return -b * y + gamma * std::log(y); };
    // clamp until the formula is both <= 1 and nonincreasing (slope in y
    // turns at y = gamma/b; the floor y >= 1 keeps ln ln x nonnegative)
    t.set_x0(std::exp(descend_to_zero(t.log_raw_ln_, std::max(1.0, gamma / b))));
    t.moment_critical_p_ = b;
    t.mgf_critical_lambda_ = 0.0;
    t.validate_shape();
    return t;
}

TailFunction TailFunction::exp_poly(double b, double gamma) {
    // default normalization: clamp ends at e with T(e) = 1 exactly
    return exp_poly(b, gamma, std::exp(b * euler_e - gamma), euler_e);
}

TailFunction TailFunction::exp_poly(double b, double gamma, double C, double x0_hint) {
    if (!(b > 0.0) || !(gamma >= 0.0) || !(C > 0.0))
        throw input_error("exp-poly tail requires b > 0, gamma >= 0, C > 0");
    TailFunction t;
    t.family_ = TailFamily::exp_poly;
    t.name_ = "exp-poly";
    t.params_ = {{"b", b}, {"gamma", gamma}, {"C", C}};
    double log_c = std::log(C);
    t.log_raw_ln_ = [b, gamma, log_c](double y) {
        return log_c + gamma * y - b * std::exp(y);
    };
    // the formula rises until x = gamma/b; the clamp may not end before that
    double x_m = gamma > 0 ? gamma / b : 0.0;
    double raw_at_xm = x_m > 0 ? log_c + gamma * std::log(x_m) - b * x_m : log_c;
    double natural;
    if (raw_at_xm <= 0.0)
        natural = x_m;
    else if (x_m == 0.0)
        natural = log_c / b; // pure exponential: C e^{-b x} = 1
    else
        natural = std::exp(descend_to_zero(t.log_raw_ln_, std::log(x_m)));
    if (x0_hint > 0.0) {
        if (x0_hint < natural * (1.0 - 1e-12))
            throw input_error("supplied x0 lies where the exp-poly formula exceeds 1 or still rises");
        t.set_x0(x0_hint);
    } else {
        t.set_x0(natural);
    }
    t.moment_critical_p_ = inf;
    t.mgf_critical_lambda_ = b;
    t.validate_shape();
    return t;
}

TailFunction TailFunction::weibull(double c, double m) {
    if (!(c > 0.0) || !(m > 0.0))
        throw input_error("weibull tail requires c > 0 and m > 0");
    TailFunction t;
    t.family_ = TailFamily::weibull;
    t.name_ = "weibull";
    t.params_ = {{"c", c}, {"m", m}};
    double log_c = std::log(c);
    t.log_raw_ln_ = [log_c, m](double y) {
        double lm = log_c + m * y; // ln(c x^m)
        return lm > 709.0 ? neg_inf : -std::exp(lm);
    };
    t.set_x0(0.0);
    t.moment_critical_p_ = inf;
    t.mgf_critical_lambda_ = m > 1.0 ? inf : (m == 1.0 ? c : 0.0);
    t.validate_shape();
    return t;
}

TailFunction TailFunction::log_power(double k, double beta) {
    if (!(k > 0.0) || !(beta > 0.0))
        throw input_error("log-power tail requires k > 0 and beta > 0");
    TailFunction t;
    t.family_ = TailFamily::log_power;
    t.name_ = "log-power";
    t.params_ = {{"k", k}, {"beta", beta}};
    double expo = 1.0 + 1.0 / beta;
    t.log_raw_ln_ = [k, expo](double y) {
        // ln(1+x) = y + ln(1+e^{-y}) without forming x
        double l1p = y > 36.0 ? y : std::log1p(std::exp(y));
        return -k * std::pow(l1p, expo);
    };
    t.set_x0(0.0);
    t.moment_critical_p_ = inf; // all power moments, no exponential ones
    t.mgf_critical_lambda_ = 0.0;
    t.validate_shape();
    return t;
}

TailFunction TailFunction::subgaussian() {
    TailFunction t;
    t.family_ = TailFamily::subgaussian;
    t.name_ = "subgaussian";
    t.log_raw_ln_ = [](double y) {
        return y > 354.0 ? neg_inf : -0.5 * std::exp(2.0 * y);
    };
    t.set_x0(0.0);
    t.moment_critical_p_ = inf;
    t.mgf_critical_lambda_ = inf;
    t.validate_shape();
    return t;
}

TailFunction TailFunction::pure_power(double r) {
    if (!(r > 0.0)) throw input_error("pure-power tail requires r > 0");
    TailFunction t;
    t.family_ = TailFamily::pure_power;
    t.name_ = "pure-power";
    t.params_ = {{"r", r}};
    t.log_raw_ln_ = [r](double y) { return -r * y; };
    t.set_x0(1.0);
    t.moment_critical_p_ = r;
    t.mgf_critical_lambda_ = 0.0;
    t.validate_shape();
    return t;
}

TailFunction TailFunction::gen_weibull_log(double c, double m, double a) {
    if (!(c > 0.0) || !(m > 1.0) || !(a >= 0.0))
        throw input_error("gen-weibull-log tail requires c > 0, m > 1, a >= 0");
    TailFunction t;
    t.family_ = TailFamily::gen_weibull_log;
    t.name_ = "gen-weibull-log";
    t.params_ = {{"c", c}, {"m", m}, {"a", a}};
    double q = m / (m - 1.0);
    double log_cq = std::log(c / q);
    t.log_raw_ln_ = [q, a, log_cq](double y) {
        double u = (q - 1.0) * y; // ln x^{q-1}
        double lw = u > 23.0 ? u : std::log(euler_e + std::exp(u)); // ln(e + x^{q-1})
        double mag = log_cq + q * y - a * (q - 1.0) * std::log(lw);
        return mag > 709.0 ? neg_inf : -std::exp(mag);
    };
    t.set_x0(0.0);
    t.moment_critical_p_ = inf;
    t.mgf_critical_lambda_ = inf; // q > 1: decay beats every exponential
    t.validate_shape();
    return t;
}

TailFunction TailFunction::custom(std::string name,
                                  std::function<double(double)> log_tail,
                                  double x0,
                                  double moment_critical_p,
                                  double mgf_critical_lambda) {
    auto f = std::move(log_tail);
    return custom_ln(std::move(name),
                     [f](double y) { return f(std::exp(std::min(y, 709.0))); }, x0,
                     moment_critical_p, mgf_critical_lambda);
}

TailFunction TailFunction::custom_ln(std::string name,
                                     std::function<double(double)> log_tail_of_ln_x,
                                     double x0,
                                     double moment_critical_p,
                                     double mgf_critical_lambda) {
    if (!(x0 >= 0.0)) throw input_error("custom tail requires x0 >= 0");
    TailFunction t;
    t.family_ = TailFamily::custom;
    t.name_ = std::move(name);
    t.log_raw_ln_ = std::move(log_tail_of_ln_x);
    t.set_x0(x0);
    t.moment_critical_p_ = moment_critical_p;
    t.mgf_critical_lambda_ = mgf_critical_lambda;
    t.validate_shape();
    return t;
}

TailFunction TailFunction::scaled(double c) const {
    if (!(c > 0.0)) throw input_error("tail scale factor must be positive");
    auto base = std::make_shared<TailFunction>(*this);
    double lc = std::log(c);
    TailFunction t;
    t.family_ = TailFamily::custom;
    t.name_ = name_ + "*scaled";
    t.log_raw_ln_ = [base, lc](double y) { return base->log_eval_ln(y - lc); };
    t.set_x0(x0_ * c);
    t.moment_critical_p_ = moment_critical_p_;
    t.mgf_critical_lambda_ = mgf_critical_lambda_ / c;
    return t;
}

double TailFunction::quantile_below(double q) const {
    if (!(q > 0.0) || !(q < 1.0)) throw input_error("quantile level must be in (0,1)");
    double lq = std::log(q);
    double lo = std::max(x0_, 1e-12);
    if (log_eval(lo * (1.0 + 1e-9)) <= lq) return lo * (1.0 + 1e-9);
    double hi = std::max(1.0, lo) * 2.0;
    int guard = 0;
    while (log_eval(hi) > lq) {
        hi *= 2.0;
        if (++guard > 990) throw convergence_error("tail never reached the quantile level", hi);
    }
    return bisect_increasing_predicate([&](double x) { return log_eval(x) <= lq; }, lo, hi, 1e-12);
}

TailFunction make_tail(const std::string& family,
                       const std::vector<std::pair<std::string, double>>& params,
                       double x0_override) {
    TailFunction t = [&]() {
        if (family == "power-log")
            return TailFunction::power_log(require_param(params, "b"), require_param(params, "gamma"));
        if (family == "exp-poly") {
            double b = require_param(params, "b"), g = require_param(params, "gamma");
            if (const double* c = find_param(params, "C"))
                return TailFunction::exp_poly(b, g, *c, x0_override > 0 ? x0_override : 0.0);
            if (x0_override > 0)
                return TailFunction::exp_poly(b, g, std::exp(b * x0_override - g * std::log(x0_override)),
                                              x0_override);
            return TailFunction::exp_poly(b, g);
        }
        if (family == "weibull")
            return TailFunction::weibull(require_param(params, "c"), require_param(params, "m"));
        if (family == "log-power")
            return TailFunction::log_power(require_param(params, "k"), require_param(params, "beta"));
        if (family == "subgaussian")
            return TailFunction::subgaussian();
        if (family == "pure-power")
            return TailFunction::pure_power(require_param(params, "r"));
        if (family == "gen-weibull-log")
            return TailFunction::gen_weibull_log(require_param(params, "c"),
                                                 require_param(params, "m"),
                                                 require_param(params, "a"));
        throw input_error("unknown tail family '" + family + "'");
    }();
    if (x0_override > 0 && t.family() != TailFamily::exp_poly) {
        if (x0_override < t.x0() * (1.0 - 1e-12))
            throw input_error("supplied x0 lies inside the region where the formula exceeds 1");
        // extra clamping is always legal: rebuild as a custom wrapper
        auto base = std::make_shared<TailFunction>(t);
        return TailFunction::custom_ln(std::string(tail_family_name(t.family())) + "*clamped",
                                       [base](double y) { return base->log_eval_ln(y); },
                                       x0_override, t.moment_critical_p(),
                                       t.mgf_critical_lambda());
    }
    return t;
}

TailFunction tail_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("tail JSON parse failure: ") + e.what());
    }
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw input_error("tail JSON needs a string 'family' field");
    std::vector<std::pair<std::string, double>> params;
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw input_error("tail JSON 'params' must be an object");
        for (auto& [k, v] : j["params"].items()) {
            if (!v.is_number()) throw input_error("tail parameter '" + k + "' must be numeric");
            params.emplace_back(k, v.get<double>());
        }
    }
    double x0 = -1.0;
    if (j.contains("x0")) {
        if (!j["x0"].is_number()) throw input_error("tail JSON 'x0' must be numeric");
        x0 = j["x0"].get<double>();
    }
    return make_tail(j["family"].get<std::string>(), params, x0);
}

JsonValue TailFunction::to_json() const {
    if (family_ == TailFamily::custom)
        throw input_error("custom tails have no serialized form");
    JsonValue p = JsonValue::object();
    for (const auto& [k, v] : params_) p.set(k, JsonValue(v));
    JsonValue out = JsonValue::object();
    out.set("family", tail_family_name(family_));
    out.set("params", std::move(p));
    out.set("x0", x0_);
    return out;
}

NormEstimate lorentz_quasinorm(const TailFunction& tail, const TailFunction& bound,
                               const LorentzOptions& opt) {
    if (opt.points < 16 || opt.levels < 1 || !(opt.growth_threshold > 1.0))
        throw input_error("invalid lorentz options");
    double base_xmax = std::max(tail.quantile_below(opt.tail_floor),
                                bound.quantile_below(opt.tail_floor));
    double x_lo = base_xmax * 1e-9;

    NormEstimate est;
    est.method = "lorentz";
    double best_log = 0.0; // ratio at x=0 is exactly 1
    for (std::size_t level = 0; level < opt.levels; ++level) {
        double xmax = base_xmax * std::pow(2.0, static_cast<double>(level));
        std::size_t n = opt.points << level;
        for (double x : geometric_points(x_lo, xmax, n)) {
            double lt = tail.log_eval(x);
            double lb = bound.log_eval(x);
            if (lb == -inf && lt > -inf) {
                est.diverged = true;
                est.witness = x;
                est.value = inf;
                est.trace.push_back(inf);
                return est;
            }
            if (lb == -inf) continue; // both vanished
            best_log = std::max(best_log, lt - lb);
        }
        est.trace.push_back(std::exp(best_log));
    }
    est.value = est.trace.back();
    if (est.trace.size() >= 2) {
        bool growing = true;
        for (std::size_t i = 1; i < est.trace.size(); ++i)
            growing = growing && est.trace[i] >= est.trace[i - 1] * opt.growth_threshold;
        est.diverged = growing;
    }
    return est;
}

} // namespace tailnorm
