#include "tailnorm/bphi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>

#include <json.hpp>

#include "tailnorm/numerics.hpp"

namespace tailnorm {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double find_param(const std::vector<std::pair<std::string, double>>& params,
                  const std::string& key) {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    throw input_error("phi family parameter '" + key + "' missing");
}

// junction ratio u = lambda_j / b for the log-pole family: the quadratic
// through the origin is tangent where lambda phi'(lambda) = 2 phi(lambda),
// i.e. u/(1-u) = -2 ln(1-u).  Independent of b and gamma.
double log_pole_junction_ratio() {
    static const double u = bisect_root(
        [](double t) { return t / (1.0 - t) + 2.0 * std::log1p(-t); }, 0.05, 0.95, 1e-14);
    return u;
}

} // namespace

const char* phi_family_name(PhiFamily f) {
    switch (f) {
        case PhiFamily::quadratic: return "quadratic";
        case PhiFamily::power: return "power";
        case PhiFamily::power_log: return "power-log";
        case PhiFamily::log_pole: return "log-pole";
    }
    return "quadratic";
}

double PhiFunction::operator()(double lambda) const {
    double u = std::abs(lambda);
    if (u >= lambda0_) return inf;
    if (u < lambda_j_) return c_ * u * u;
    switch (family_) {
        case PhiFamily::quadratic: return 0.5 * u * u;
        case PhiFamily::power: {
            double m = params_[0].second;
            return std::pow(u, m) / m;
        }
        case PhiFamily::power_log: {
            double m = params_[0].second, a = params_[1].second;
            double q = m / (m - 1.0);
            double um = std::pow(u, m);
            return um / m * std::pow(std::log(std::numbers::e + um), a / q);
        }
        case PhiFamily::log_pole: {
            double gamma = params_[1].second;
            return gamma * (std::log(lambda0_) - std::log(lambda0_ - u));
        }
    }
    return 0.0;
}

ConjugatePoint PhiFunction::conjugate_point(double x) const {
    x = std::abs(x); // the conjugate of an even function is even
    switch (family_) {
        case PhiFamily::quadratic: return {0.5 * x * x, x, true};
        case PhiFamily::power: {
            double m = params_[0].second;
            if (x <= 2.0 / m) return {0.25 * m * x * x, 0.5 * m * x, true};
            if (x <= 1.0) return {x - 1.0 / m, 1.0, true}; // slope gap at the splice
            double q = m / (m - 1.0);
            return {std::pow(x, q) / q, std::pow(x, 1.0 / (m - 1.0)), true};
        }
        case PhiFamily::log_pole: {
            double gamma = params_[1].second;
            double x_j = 2.0 * c_ * lambda_j_; // phi'(lambda_j), tangency makes it exact
            if (x <= x_j) return {0.25 * x * x / c_, 0.5 * x / c_, true};
            double arg = lambda0_ - gamma / x;
            return {lambda0_ * x - gamma - gamma * std::log(lambda0_ * x / gamma), arg, true};
        }
        case PhiFamily::power_log: {
            return conjugate_value([this](double l) { return (*this)(l); }, domain(), x);
        }
    }
    return {};
}

void PhiFunction::validate_shape() const {
    double hi = std::isfinite(lambda0_) ? lambda0_ * (1.0 - 1e-7) : 100.0;
    auto grid = geometric_points(1e-3, hi, 64);
    double prev_slope = 0.0, prev_v = 0.0, prev_x = 0.0, scale = 1.0;
    for (double x : grid) {
        double v = (*this)(x);
        if (!(v >= 0.0) || !std::isfinite(v))
            throw construction_error("phi '" + name_ + "' not finite at lambda=" + fmt(x));
        if ((*this)(-x) != v)
            throw construction_error("phi '" + name_ + "' is not even");
        double s = (v - prev_v) / (x - prev_x);
        scale = std::max(scale, s);
        if (s < prev_slope - 1e-9 * scale)
            throw construction_error("phi '" + name_ + "' fails convexity near lambda=" + fmt(x));
        prev_slope = s;
        prev_v = v;
        prev_x = x;
    }
    // superlinearity: the last difference quotient must dwarf the first
    double first = ((*this)(grid[1]) - (*this)(grid[0])) / (grid[1] - grid[0]);
    if (!(prev_slope > 20.0 * std::max(first, 1e-12)))
        throw construction_error("phi '" + name_ + "' does not grow superlinearly");
}

PhiFunction PhiFunction::quadratic() {
    PhiFunction f;
    f.family_ = PhiFamily::quadratic;
    f.name_ = "quadratic";
    f.lambda_j_ = 0.0;
    f.c_ = 0.5;
    f.validate_shape();
    return f;
}

PhiFunction PhiFunction::power(double m) {
    if (!(m >= 2.0) || !std::isfinite(m))
        throw input_error("power phi requires finite m >= 2 (the quadratic splice "
                          "below 1 would break convexity otherwise)");
    PhiFunction f;
    f.family_ = PhiFamily::power;
    f.name_ = "power";
    f.params_ = {{"m", m}};
    f.lambda_j_ = 1.0;
    f.c_ = 1.0 / m; // value match at 1; the slope jumps up, staying convex
    f.validate_shape();
    return f;
}

PhiFunction PhiFunction::power_log(double m, double a) {
    if (!(m >= 2.0) || !std::isfinite(m) || !(a >= 0.0) || !std::isfinite(a))
        throw input_error("power-log phi requires finite m >= 2 and a >= 0");
    PhiFunction f;
    f.family_ = PhiFamily::power_log;
    f.name_ = "power-log";
    f.params_ = {{"m", m}, {"a", a}};
    f.lambda_j_ = 1.0;
    double q = m / (m - 1.0);
    f.c_ = std::pow(std::log(std::numbers::e + 1.0), a / q) / m;
    f.validate_shape();
    return f;
}

PhiFunction PhiFunction::log_pole(double b, double gamma) {
    if (!(b > 1.0) || !std::isfinite(b) || !(gamma > 0.0) || !std::isfinite(gamma))
        throw input_error("log-pole phi requires finite b > 1 and gamma > 0");
    PhiFunction f;
    f.family_ = PhiFamily::log_pole;
    f.name_ = "log-pole";
    f.params_ = {{"b", b}, {"gamma", gamma}};
    f.lambda0_ = b;
    f.lambda_j_ = log_pole_junction_ratio() * b;
    f.c_ = gamma * (std::log(b) - std::log(b - f.lambda_j_)) / (f.lambda_j_ * f.lambda_j_);
    f.validate_shape();
    return f;
}

PhiFunction make_phi(const std::string& family,
                     const std::vector<std::pair<std::string, double>>& params) {
    if (family == "quadratic") return PhiFunction::quadratic();
    if (family == "power") return PhiFunction::power(find_param(params, "m"));
    if (family == "power-log")
        return PhiFunction::power_log(find_param(params, "m"), find_param(params, "a"));
    if (family == "log-pole")
        return PhiFunction::log_pole(find_param(params, "b"), find_param(params, "gamma"));
    throw input_error("unknown phi family '" + family + "'");
}

PhiFunction phi_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("phi JSON parse failure: ") + e.what());
    }
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw input_error("phi JSON needs a string 'family' field");
    std::vector<std::pair<std::string, double>> params;
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw input_error("phi JSON 'params' must be an object");
        for (auto& [k, v] : j["params"].items()) {
            if (!v.is_number()) throw input_error("phi parameter '" + k + "' must be numeric");
            params.emplace_back(k, v.get<double>());
        }
    }
    return make_phi(j["family"].get<std::string>(), params);
}

JsonValue PhiFunction::to_json() const {
    JsonValue p = JsonValue::object();
    for (const auto& [k, v] : params_) p.set(k, JsonValue(v));
    JsonValue out = JsonValue::object();
    out.set("family", phi_family_name(family_));
    out.set("params", std::move(p));
    out.set("lambda0", JsonValue(lambda0_));
    return out;
}

MgfValue MgfFunction::operator()(double lambda) const { return eval_(lambda); }

MgfFunction MgfFunction::from_tail(const TailFunction& tail, const QuadratureSpec& spec) {
    MgfFunction m;
    m.name_ = tail.name();
    m.critical_ = tail.mgf_critical_lambda();
    m.eval_ = [tail, spec](double l) { return mgf(tail, l, spec); };
    // exponential decay implies every moment, so the second moment is safe
    m.variance_ = m.critical_ > 0.0 ? std::pow(moment(tail, 2.0, spec), 2.0) : inf;
    return m;
}

MgfFunction MgfFunction::analytic(std::string name, std::function<double(double)> log_mgf,
                                  double critical, double variance) {
    if (!(critical > 0.0)) throw input_error("analytic MGF needs a positive critical lambda");
    MgfFunction m;
    m.name_ = std::move(name);
    m.critical_ = critical;
    if (std::isnan(variance)) {
        double h = 1e-4;
        variance = 2.0 * log_mgf(h) / (h * h);
    }
    if (!(variance >= 0.0)) throw input_error("analytic MGF variance must be nonnegative");
    m.variance_ = variance;
    m.eval_ = [fn = std::move(log_mgf), critical](double l) {
        MgfValue v;
        v.critical = critical;
        if (l == 0.0) return v;
        if (std::abs(l) >= critical) {
            v.diverged = true;
            v.value = inf;
            v.log_value = inf;
            return v;
        }
        v.log_value = fn(std::abs(l));
        v.value = std::exp(v.log_value);
        return v;
    };
    return m;
}

std::vector<double> default_lambda_grid(const PhiFunction& phi) {
    if (std::isfinite(phi.lambda0())) return make_pole_grid(1e-3, phi.lambda0()).points;
    return geometric_points(1e-3, 1000.0, 120);
}

NormEstimate bphi_norm(const MgfFunction& mgf_fn, const PhiFunction& phi,
                       const std::vector<double>& lambda_grid, const BphiOptions& opt) {
    if (lambda_grid.empty()) throw input_error("bphi_norm needs a nonempty lambda grid");
    if (!(opt.rel_width > 0.0) || !(opt.tau_cap > 0.0))
        throw input_error("invalid bphi_norm options");
    double lam_max = 0.0;
    for (double l : lambda_grid) {
        if (!(l > 0.0) || l >= phi.lambda0())
            throw input_error("lambda grid point " + fmt(l) + " outside (0, lambda0) of phi '" +
                              phi.name() + "'");
        lam_max = std::max(lam_max, l);
    }

    NormEstimate est;
    est.method = "bphi-bisect";
    std::size_t n = lambda_grid.size();
    std::vector<double> logm(n);
    for (std::size_t i = 0; i < n; ++i) {
        MgfValue v = mgf_fn(lambda_grid[i]);
        if (v.diverged) {
            est.value = inf;
            est.diverged = true;
            est.witness = lambda_grid[i];
            est.trace = {inf};
            return est;
        }
        logm[i] = v.log_value;
    }

    auto feasible = [&](double tau) {
        for (std::size_t i = 0; i < n; ++i) {
            double u = lambda_grid[i] * tau;
            if (u >= phi.lambda0()) return false; // strict: tau may not leave the domain
            if (logm[i] > phi(u)) return false;
        }
        return true;
    };

    double hi = opt.tau_cap;
    if (std::isfinite(phi.lambda0()))
        hi = std::min(hi, phi.lambda0() / lam_max * (1.0 - 1e-9));
    // the lambda -> 0 regime pins tau from below through the second
    // derivatives; the grid need not witness it
    double lo = std::sqrt(mgf_fn.variance() / phi.second_deriv0());
    if (!(lo > 0.0)) lo = 1e-8;

    if (lo > hi || !feasible(hi)) {
        est.value = inf;
        est.diverged = true;
        est.trace = {inf};
        if (lo > hi) {
            est.witness = *std::min_element(lambda_grid.begin(), lambda_grid.end());
        } else {
            double worst = -inf;
            for (std::size_t i = 0; i < n; ++i) {
                double u = lambda_grid[i] * hi;
                double gap = u >= phi.lambda0() ? inf : logm[i] - phi(u);
                if (gap > worst) {
                    worst = gap;
                    est.witness = lambda_grid[i];
                }
            }
        }
        return est;
    }
    if (feasible(lo)) {
        est.value = lo;
        est.trace = {lo};
        return est;
    }
    est.trace.push_back(hi);
    while (hi - lo > opt.rel_width * hi) {
        double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            hi = mid;
            est.trace.push_back(hi);
        } else {
            lo = mid;
        }
    }
    est.value = hi; // certified feasible end of the bracket
    return est;
}

NormEstimate bphi_norm(const MgfFunction& mgf_fn, const PhiFunction& phi,
                       const BphiOptions& opt) {
    return bphi_norm(mgf_fn, phi, default_lambda_grid(phi), opt);
}

NormEstimate bphi_norm(const TailFunction& tail, const PhiFunction& phi,
                       const std::vector<double>& lambda_grid, const BphiOptions& opt) {
    return bphi_norm(MgfFunction::from_tail(tail, opt.quadrature), phi, lambda_grid, opt);
}

NormEstimate bphi_norm(const TailFunction& tail, const PhiFunction& phi,
                       const BphiOptions& opt) {
    return bphi_norm(MgfFunction::from_tail(tail, opt.quadrature), phi,
                     default_lambda_grid(phi), opt);
}

TailFunction bphi_tail_bound(const PhiFunction& phi, double K) {
    if (!(K > 0.0) || !std::isfinite(K))
        throw input_error("bphi_tail_bound needs a positive finite norm value");
    double lk = std::log(K);
    double lcrit = std::isfinite(phi.lambda0()) ? phi.lambda0() / K : inf;
    return TailFunction::custom_ln(
        "bphi-bound[" + phi.name() + "]",
        [phi, lk](double y) { return -phi.conjugate_at(std::exp(y - lk)); }, 0.0, inf, lcrit);
}

SampledConvexFunction natural_phi(const std::vector<TailFunction>& tails,
                                  const std::vector<double>& lambda_grid,
                                  const QuadratureSpec& spec) {
    if (tails.empty()) throw input_error("natural_phi needs at least one tail");
    if (lambda_grid.empty()) throw input_error("natural_phi needs a nonempty lambda grid");
    for (const TailFunction& t : tails)
        if (!(t.mgf_critical_lambda() > 0.0))
            throw input_error("tail '" + t.name() +
                              "' has no exponential moment; its MGF diverges for every "
                              "positive lambda");
    double prev = 0.0;
    for (double l : lambda_grid) {
        if (!(l > prev)) throw input_error("lambda grid must be ascending and positive");
        prev = l;
    }
    std::vector<double> xs{0.0}, vs{0.0}; // symmetrized MGF is exactly 1 at 0
    for (double l : lambda_grid) {
        double best = -inf;
        for (const TailFunction& t : tails) {
            MgfValue v = mgf(t, l, spec);
            if (v.diverged) {
                best = inf;
                break;
            }
            best = std::max(best, v.log_value);
        }
        xs.push_back(l);
        vs.push_back(best);
    }
    return SampledConvexFunction("natural-phi", std::move(xs), std::move(vs),
                                 {0.0, lambda_grid.back(), true});
}

SampledConvexFunction n_function(const PhiFunction& phi, const std::vector<double>& u_grid) {
    if (u_grid.size() < 2) throw input_error("n_function needs at least two grid points");
    double prev = -inf;
    for (double u : u_grid) {
        if (!(u >= 0.0) || !(u > prev)) throw input_error("u grid must be ascending and >= 0");
        prev = u;
    }
    std::vector<double> vs;
    vs.reserve(u_grid.size());
    for (double u : u_grid) vs.push_back(std::expm1(phi.conjugate_at(u)));
    return SampledConvexFunction("n-function[" + phi.name() + "]", u_grid, std::move(vs),
                                 {u_grid.front(), u_grid.back(), true});
}

ZConditionReport z_condition_check(const PhiFunction& phi, double c1,
                                   const LeveledGrid& lambda_grid, const ZConditionOptions& opt) {
    if (!(c1 > 0.0) || !std::isfinite(c1)) throw input_error("C1 must be positive and finite");
    if (std::isfinite(phi.lambda0()))
        throw not_applicable_error("the Z condition assumes lambda0 = inf; phi '" + phi.name() +
                                   "' has a pole at " + fmt(phi.lambda0()));
    if (!(opt.growth_threshold > 1.0))
        throw input_error("z_condition growth threshold must exceed 1");
    if (lambda_grid.points.empty()) throw input_error("z_condition needs a nonempty grid");
    for (double l : lambda_grid.points)
        if (!(l > std::numbers::e))
            throw input_error("z_condition grid must sit above e; got " + fmt(l));

    ZConditionReport rep;
    rep.c1 = c1;
    rep.points.reserve(lambda_grid.points.size());
    for (double l : lambda_grid.points) {
        ZConditionPoint pt;
        pt.lambda = l;
        pt.theta = c1 / (l * phi.conjugate_point(l).argmax);
        try {
            LogIntegralResult z = log_integrate_peaked(
                [&](double y) { return y - pt.theta * phi.conjugate_at(std::exp(y)); },
                opt.quadrature, -745.0);
            pt.z_log = z.log_value;
        } catch (const convergence_error&) {
            pt.z_finite = false;
            pt.z_log = inf;
        }
        if (pt.z_finite && pt.z_log > 0.0) {
            double hi = 1.0;
            while (phi.conjugate_at(hi) < pt.z_log && hi < 1e12) hi *= 2.0;
            pt.c = bisect_root([&](double u) { return phi.conjugate_at(u) - pt.z_log; }, 0.0,
                               hi) /
                   l;
        }
        rep.points.push_back(pt);
    }

    std::vector<std::size_t> offs = lambda_grid.level_offsets;
    if (offs.empty()) offs = {rep.points.size()};
    double best = 0.0;
    std::size_t i = 0;
    bool all_finite = true;
    for (std::size_t off : offs) {
        for (; i < off && i < rep.points.size(); ++i) {
            best = std::max(best, rep.points[i].c);
            all_finite = all_finite && rep.points[i].z_finite;
        }
        rep.trace.push_back(best);
    }
    rep.c_sup = rep.trace.back();
    bool growing = rep.trace.size() >= 2;
    for (std::size_t k = 1; k < rep.trace.size(); ++k)
        growing = growing && rep.trace[k] >= rep.trace[k - 1] * opt.growth_threshold;
    rep.bounded = all_finite && !growing;
    return rep;
}

ZConditionReport z_condition_check(const PhiFunction& phi, double c1) {
    return z_condition_check(phi, c1, make_cap_grid(3.0), {});
}

} // namespace tailnorm
