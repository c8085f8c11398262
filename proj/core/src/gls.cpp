#include "tailnorm/gls.hpp"

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
    throw input_error("psi family parameter '" + key + "' missing");
}

} // namespace

const char* psi_family_name(PsiFamily f) {
    switch (f) {
        case PsiFamily::flat: return "flat";
        case PsiFamily::power: return "power";
        case PsiFamily::exp_power: return "exp-power";
        case PsiFamily::grand: return "grand";
    }
    return "flat";
}

bool PsiFunction::contains(double p) const {
    if (!(p >= 1.0)) return false;
    return closed_ ? p <= b_ : p < b_;
}

double PsiFunction::log_eval(double p) const {
    if (!contains(p))
        throw input_error("psi '" + name_ + "' evaluated at p = " + fmt(p) +
                          " outside its support");
    switch (family_) {
        case PsiFamily::flat: return 0.0;
        case PsiFamily::power: return std::log(p) / find_param(params_, "m");
        case PsiFamily::exp_power: {
            double C = params_[0].second, beta = params_[1].second;
            return C * (std::pow(p, beta) - 1.0);
        }
        case PsiFamily::grand: {
            double gamma = params_[1].second;
            return gamma / b_ * (std::log(b_ - 1.0) - std::log(b_ - p));
        }
    }
    return 0.0;
}

double PsiFunction::raw(double p) const { return std::exp(log_eval(p)) * norm_; }

PsiFunction PsiFunction::flat(double r) {
    if (!(r > 1.0) || !std::isfinite(r))
        throw input_error("flat psi requires a finite r > 1");
    PsiFunction f;
    f.family_ = PsiFamily::flat;
    f.name_ = "flat";
    f.params_ = {{"r", r}};
    f.b_ = r;
    f.closed_ = true;
    return f;
}

PsiFunction PsiFunction::power(double m) {
    if (!(m > 0.0) || !std::isfinite(m))
        throw input_error("power psi requires m > 0");
    PsiFunction f;
    f.family_ = PsiFamily::power;
    f.name_ = "power";
    f.params_ = {{"m", m}};
    f.b_ = inf;
    return f;
}

PsiFunction PsiFunction::exp_power(double C, double beta) {
    if (!(C > 0.0) || !(beta > 0.0) || !std::isfinite(C) || !std::isfinite(beta))
        throw input_error("exp-power psi requires C > 0 and beta > 0");
    PsiFunction f;
    f.family_ = PsiFamily::exp_power;
    f.name_ = "exp-power";
    f.params_ = {{"C", C}, {"beta", beta}};
    f.b_ = inf;
    f.norm_ = std::exp(C); // raw inf sits at p = 1
    return f;
}

PsiFunction PsiFunction::grand(double b, double gamma) {
    if (!(b > 1.0) || !(gamma > 0.0) || !std::isfinite(b) || !std::isfinite(gamma))
        throw input_error("grand psi requires a finite b > 1 and gamma > 0");
    PsiFunction f;
    f.family_ = PsiFamily::grand;
    f.name_ = "grand";
    f.params_ = {{"b", b}, {"gamma", gamma}};
    f.b_ = b;
    f.norm_ = std::pow(b - 1.0, -gamma / b); // raw inf sits at p = 1
    return f;
}

PsiFunction make_psi(const std::string& family,
                     const std::vector<std::pair<std::string, double>>& params) {
    if (family == "flat") return PsiFunction::flat(find_param(params, "r"));
    if (family == "power") return PsiFunction::power(find_param(params, "m"));
    if (family == "exp-power")
        return PsiFunction::exp_power(find_param(params, "C"), find_param(params, "beta"));
    if (family == "grand")
        return PsiFunction::grand(find_param(params, "b"), find_param(params, "gamma"));
    throw input_error("unknown psi family '" + family + "'");
}

PsiFunction psi_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("psi JSON parse failure: ") + e.what());
    }
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw input_error("psi JSON needs a string 'family' field");
    std::vector<std::pair<std::string, double>> params;
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw input_error("psi JSON 'params' must be an object");
        for (auto& [k, v] : j["params"].items()) {
            if (!v.is_number()) throw input_error("psi parameter '" + k + "' must be numeric");
            params.emplace_back(k, v.get<double>());
        }
    }
    return make_psi(j["family"].get<std::string>(), params);
}

JsonValue PsiFunction::to_json() const {
    JsonValue p = JsonValue::object();
    for (const auto& [k, v] : params_) p.set(k, JsonValue(v));
    JsonValue out = JsonValue::object();
    out.set("family", psi_family_name(family_));
    out.set("params", std::move(p));
    out.set("normalization", norm_);
    return out;
}

LeveledGrid default_psi_grid(const PsiFunction& psi) {
    if (!std::isfinite(psi.b())) return make_cap_grid(1.0);
    if (psi.closed_end()) return make_closed_grid(1.0, psi.b(), 120);
    return make_pole_grid(1.0, psi.b());
}

NormEstimate gls_norm(const MomentCurve& curve, const PsiFunction& psi,
                      const GlsOptions& opt) {
    if (curve.p.empty()) throw input_error("gls_norm needs a nonempty moment curve");
    if (!(opt.growth_threshold > 1.0))
        throw input_error("gls divergence threshold must exceed 1");
    for (double p : curve.p)
        if (!psi.contains(p))
            throw input_error("moment grid point p = " + fmt(p) + " outside the support of psi '" +
                              psi.name() + "'");
    std::vector<std::size_t> offs = curve.level_offsets;
    if (offs.empty()) offs = {curve.p.size()};

    NormEstimate est;
    est.method = "gls-grid-sup";
    double best = 0.0, best_p = curve.p.front();
    std::size_t i = 0;
    for (std::size_t off : offs) {
        for (; i < off && i < curve.p.size(); ++i) {
            double r = std::exp(std::log(curve.value[i]) - psi.log_eval(curve.p[i]));
            if (r > best) {
                best = r;
                best_p = curve.p[i];
            }
        }
        est.trace.push_back(best);
    }
    est.value = est.trace.back();
    bool grew = est.trace.size() >= 2;
    for (std::size_t k = 1; k < est.trace.size(); ++k)
        grew = grew && est.trace[k] >= est.trace[k - 1] * opt.growth_threshold;
    est.diverged = grew;
    if (est.diverged) est.witness = best_p;
    return est;
}

TailFunction gls_tail_bound(const PsiFunction& psi, double V, const LeveledGrid& p_grid) {
    if (!(V > 0.0) || !std::isfinite(V))
        throw input_error("gls_tail_bound needs a positive finite norm value");
    if (p_grid.points.empty()) throw input_error("gls_tail_bound needs a nonempty exponent grid");
    auto pts = std::make_shared<std::vector<std::pair<double, double>>>();
    pts->reserve(p_grid.points.size());
    double p_max = 0.0;
    for (double p : p_grid.points) {
        if (!psi.contains(p))
            throw input_error("exponent grid point p = " + fmt(p) +
                              " outside the support of psi '" + psi.name() + "'");
        pts->emplace_back(p, psi.h(p));
        p_max = std::max(p_max, p);
    }
    double lv = std::log(V);
    auto log_bound = [pts, lv](double y) {
        double u = y - lv, best = -inf;
        for (const auto& [p, hp] : *pts) best = std::max(best, p * u - hp);
        return -best;
    };
    // grid envelopes have a polynomial far tail of order max(grid): moments
    // past that order diverge and no exponential moment exists
    return TailFunction::custom_ln("gls-bound[" + psi.name() + "]", log_bound, V, p_max, 0.0);
}

TailFunction gls_tail_bound(const PsiFunction& psi, double V) {
    return gls_tail_bound(psi, V, default_psi_grid(psi));
}

NormEstimate r_psi(const PsiFunction& psi, const RPsiOptions& opt) {
    if (std::isfinite(psi.b()))
        throw not_applicable_error("R[psi] is defined over an unbounded exponent support; psi '" +
                                   psi.name() + "' ends at b = " + fmt(psi.b()));
    if (!(opt.growth_threshold > 1.0))
        throw input_error("r_psi growth threshold must exceed 1");
    LeveledGrid y_grid = make_cap_grid(1.0, opt.grid);

    NormEstimate est;
    est.method = "r-psi-grid-sup";
    double best = 0.0, best_y = y_grid.points.front();
    // fresh pass per level: the argmax cap grows with the level, so earlier
    // y-points can resolve a larger maximizer than they did a level ago
    for (std::size_t lvl = 0; lvl < y_grid.levels(); ++lvl) {
        std::size_t off = y_grid.level_offsets[lvl];
        double cap = y_grid.points[off - 1];
        best = 0.0;
        for (std::size_t i = 0; i < off; ++i) {
            double y = y_grid.points[i];
            MaxResult m = maximize_concave([&](double p) { return p * y - psi.h(p); }, 1.0, cap,
                                           1e-10);
            double v = std::exp(std::log(m.arg) / y);
            if (v > best) {
                best = v;
                best_y = y;
            }
        }
        est.trace.push_back(best);
    }
    est.value = est.trace.back();
    bool grew = est.trace.size() >= 2;
    for (std::size_t k = 1; k < est.trace.size(); ++k)
        grew = grew && est.trace[k] >= est.trace[k - 1] * opt.growth_threshold;
    est.diverged = grew;
    if (est.diverged) est.witness = best_y;
    return est;
}

ConverseBoundReport gls_converse_bound(const TailFunction& tail, const PsiFunction& psi,
                                       const GlsOptions& opt) {
    ConverseBoundReport rep;
    rep.r = r_psi(psi);
    if (rep.r.diverged)
        throw not_applicable_error("R[psi] still grows at the exponent cap for psi '" +
                                   psi.name() + "'; the converse bound does not apply");
    LeveledGrid grid = default_psi_grid(psi);
    rep.direct = gls_norm(natural_psi(tail, grid), psi, opt);
    rep.lorentz = lorentz_quasinorm(tail, gls_tail_bound(psi, 1.0, grid));
    rep.bound = 2.0 * rep.r.value * std::exp(1.0 / std::numbers::e) * rep.lorentz.value;
    rep.ratio = rep.direct.value / rep.bound;
    rep.holds = !rep.direct.diverged && !rep.lorentz.diverged && rep.bound > 0.0 &&
                rep.direct.value <= rep.bound * (1.0 + 1e-9);
    return rep;
}

} // namespace tailnorm
