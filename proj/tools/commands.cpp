#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tailnorm/bphi.hpp"
#include "tailnorm/conjugate.hpp"
#include "tailnorm/counterexamples.hpp"
#include "tailnorm/errors.hpp"
#include "tailnorm/gls.hpp"
#include "tailnorm/grids.hpp"
#include "tailnorm/json_io.hpp"
#include "tailnorm/moments.hpp"
#include "tailnorm/numerics.hpp"
#include "tailnorm/tails.hpp"

namespace tailnorm::cli {

namespace {

using nlohmann::json;

json load_config(const CommonOptions& opt) {
    if (opt.config_path.empty()) return json::object();
    std::ifstream in(opt.config_path);
    if (!in) throw input_error("cannot open config file '" + opt.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::exception& e) {
        throw input_error("config JSON parse failure: " + std::string(e.what()));
    }
}

void write_output(const CommonOptions& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw input_error("cannot write output file '" + opt.out_path + "'");
    out << text;
}

template <typename Fn>
int guarded(const char* cmd, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", cmd, e.what());
        return 2;
    }
}

QuadratureSpec quad_spec(const CommonOptions& opt) {
    QuadratureSpec q;
    if (opt.tolerance > 0.0) q.rel_tol = opt.tolerance;
    q.validate();
    return q;
}

double number_field(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw input_error("config field '" + key + "' must be numeric");
    return j[key].get<double>();
}

struct GridControls {
    std::size_t points = 0; // 0 = keep defaults
    std::size_t levels = 0;
    double lo = nan_value();
    double hi = nan_value();

    static double nan_value() { return std::nan(""); }
    bool untouched() const {
        return points == 0 && levels == 0 && std::isnan(lo) && std::isnan(hi);
    }
};

GridControls grid_controls(const json& cfg, const CommonOptions& opt,
                           const char* key = "grid") {
    GridControls g;
    if (cfg.contains(key)) {
        const json& jg = cfg[key];
        if (!jg.is_object()) throw input_error(std::string("'") + key + "' must be an object");
        double p = number_field(jg, "points", 0.0);
        double l = number_field(jg, "levels", 0.0);
        if (p < 0 || l < 0) throw input_error("grid controls must be positive");
        g.points = static_cast<std::size_t>(p);
        g.levels = static_cast<std::size_t>(l);
        g.lo = number_field(jg, "lo", g.lo);
        g.hi = number_field(jg, "hi", g.hi);
    }
    if (opt.grid_points > 0) g.points = static_cast<std::size_t>(opt.grid_points);
    if (opt.levels > 0) g.levels = static_cast<std::size_t>(opt.levels);
    return g;
}

TailFunction parse_tail(const json& cfg) {
    if (!cfg.contains("tail")) throw input_error("config needs a 'tail' descriptor");
    const json& t = cfg["tail"];
    if (t.is_object() && t.contains("family") && t["family"].is_string() &&
        t["family"].get<std::string>() == "two-point") {
        // unit mass at a: T = 1 below, 0 at and past a
        double a = 1.0;
        if (t.contains("params") && t["params"].is_object())
            a = number_field(t["params"], "a", 1.0);
        if (!(a > 0.0) || !std::isfinite(a)) throw input_error("two-point tail needs a > 0");
        return TailFunction::custom_ln(
            "two-point", [](double) { return -inf; }, a, inf, inf);
    }
    return tail_from_json(t.dump());
}

JsonValue estimate_json(const NormEstimate& est) {
    JsonValue j = JsonValue::object();
    j.set("value", JsonValue(est.value));
    j.set("diverged", JsonValue(est.diverged));
    j.set("method", est.method);
    if (est.witness) j.set("witness", JsonValue(*est.witness));
    j.set("trace", JsonValue::array_of(est.trace));
    return j;
}

std::string estimate_csv(const NormEstimate& est) {
    std::string out = "field, value\n";
    out += "value, " + JsonValue::format_number(est.value) + "\n";
    out += std::string("diverged, ") + (est.diverged ? "true" : "false") + "\n";
    out += "method, " + est.method + "\n";
    if (est.witness) out += "witness, " + JsonValue::format_number(*est.witness) + "\n";
    for (double t : est.trace) out += "trace, " + JsonValue::format_number(t) + "\n";
    return out;
}

LeveledGrid psi_grid(const PsiFunction& psi, const GridControls& g) {
    if (g.untouched()) return default_psi_grid(psi);
    std::size_t ppl = g.points ? g.points : 40;
    std::size_t lev = g.levels ? g.levels : 3;
    switch (psi.family()) {
        case PsiFamily::flat:
            return make_closed_grid(1.0, psi.b(), ppl * lev);
        case PsiFamily::grand: {
            PoleGridOptions o;
            o.points_per_level = ppl;
            o.levels = lev;
            return make_pole_grid(1.0, psi.b(), o);
        }
        default: {
            CapGridOptions o;
            o.points_per_level = ppl;
            o.levels = lev;
            if (!std::isnan(g.hi)) o.first_cap = g.hi / std::pow(o.cap_ratio, lev - 1);
            return make_cap_grid(1.0, o);
        }
    }
}

std::vector<double> lambda_grid(const PhiFunction& phi, const GridControls& g) {
    if (g.untouched()) return default_lambda_grid(phi);
    std::size_t ppl = g.points ? g.points : 40;
    std::size_t lev = g.levels ? g.levels : 3;
    if (std::isfinite(phi.lambda0())) {
        PoleGridOptions o;
        o.points_per_level = ppl;
        o.levels = lev;
        return make_pole_grid(1e-3, phi.lambda0(), o).points;
    }
    double hi = std::isnan(g.hi) ? 1000.0 : g.hi;
    return geometric_points(1e-3, hi, ppl * lev);
}

std::string curves_csv(const CounterexampleReport& rep) {
    std::string out;
    for (const auto& c : rep.curves) {
        out += "# " + rep.scenario + " " + c.name + ": x = " + c.x_label +
               ", y = " + c.y_label + "\n";
        out += "x, y\n";
        for (std::size_t i = 0; i < c.x.size(); ++i)
            out += JsonValue::format_number(c.x[i]) + ", " +
                   JsonValue::format_number(c.y[i]) + "\n";
        out += "\n";
    }
    return out;
}

CounterexampleOptions scenario_options(const CommonOptions& opt) {
    CounterexampleOptions co;
    if (opt.grid_points > 0) co.points_per_level = static_cast<std::size_t>(opt.grid_points);
    if (opt.tolerance > 0.0) co.exponent_tolerance = opt.tolerance;
    return co;
}

} // namespace

int cmd_conjugate(const CommonOptions& opt) {
    return guarded("conjugate", [&] {
        json cfg;
        json descriptor;
        bool is_psi = false;
        try {
            cfg = load_config(opt);
            if (cfg.contains("family")) {
                descriptor = cfg; // the config itself is the family descriptor
            } else if (cfg.contains("phi")) {
                descriptor = cfg["phi"];
            } else if (cfg.contains("psi")) {
                descriptor = cfg["psi"];
                is_psi = true;
            } else {
                throw input_error("config needs a 'phi' or 'psi' family descriptor");
            }
        } catch (const input_error& e) {
            throw input_error("invalid family descriptor (" + std::string(e.what()) + ")");
        }

        GridControls g = grid_controls(cfg, opt);
        double x_lo = std::isnan(g.lo) ? 0.0 : g.lo;
        double x_hi = std::isnan(g.hi) ? 5.0 : g.hi;
        std::size_t n = g.points ? g.points : 101;
        if (!(x_hi > x_lo) || n < 8) throw input_error("conjugate grid needs hi > lo and >= 8 points");
        auto x_grid = linear_points(x_lo, x_hi, n);

        SampledConvexFunction star = [&] {
            if (is_psi) {
                auto psi = [&] {
                    try {
                        return psi_from_json(descriptor.dump());
                    } catch (const input_error& e) {
                        throw input_error("invalid family descriptor (" + std::string(e.what()) + ")");
                    }
                }();
                ConvexDomain dom{1.0, psi.b(), psi.closed_end()};
                auto h = [psi](double p) { return psi.h(p); };
                return conjugate(h, dom, x_grid, "h[" + psi.name() + "]-conjugate");
            }
            auto phi = [&] {
                try {
                    return phi_from_json(descriptor.dump());
                } catch (const input_error& e) {
                    throw input_error("invalid family descriptor (" + std::string(e.what()) + ")");
                }
            }();
            auto f = [phi](double l) { return phi(l); };
            return conjugate(f, phi.domain(), x_grid, phi.name() + "-conjugate");
        }();

        // round-trip check on a closed window clear of any domain pole
        double dev = [&] {
            if (is_psi) {
                auto psi = psi_from_json(descriptor.dump());
                auto pg = default_psi_grid(psi);
                SampledConvexFunction h("h[" + psi.name() + "]",
                                        [psi](double p) { return psi.h(p); },
                                        ConvexDomain{1.0, psi.b(), psi.closed_end()}, pg.points);
                return fenchel_moreau_check(h);
            }
            auto phi = phi_from_json(descriptor.dump());
            double lam_hi = std::isfinite(phi.lambda0()) ? phi.lambda0() * (29.0 / 30.0) : 3.0;
            SampledConvexFunction f(phi.name(), [phi](double l) { return phi(l); },
                                    ConvexDomain{0.0, lam_hi, true},
                                    linear_points(0.0, lam_hi, 201));
            return fenchel_moreau_check(f);
        }();

        if (opt.format == "json") {
            JsonValue j = JsonValue::object();
            j.set("name", star.name());
            j.set("fenchel_moreau_deviation", JsonValue(dev));
            j.set("x", JsonValue::array_of(star.grid()));
            j.set("f_star", JsonValue::array_of(star.values()));
            write_output(opt, j.dump(2));
        } else {
            std::string text = "# fenchel-moreau-deviation, " + JsonValue::format_number(dev) + "\n";
            text += star.csv();
            write_output(opt, text);
        }
        return 0;
    });
}

int cmd_moments(const CommonOptions& opt) {
    return guarded("moments", [&] {
        json cfg = load_config(opt);
        auto tail = parse_tail(cfg);
        GridControls g = grid_controls(cfg, opt);
        double lo = std::isnan(g.lo) ? 1.0 : g.lo;
        std::size_t ppl = g.points ? g.points : 40;
        std::size_t lev = g.levels ? g.levels : 3;
        LeveledGrid grid;
        if (!std::isnan(g.hi)) {
            grid = make_closed_grid(lo, g.hi, ppl * lev);
        } else if (std::isfinite(tail.moment_critical_p())) {
            PoleGridOptions o;
            o.points_per_level = ppl;
            o.levels = lev;
            grid = make_pole_grid(lo, tail.moment_critical_p(), o);
        } else {
            CapGridOptions o;
            o.points_per_level = ppl;
            o.levels = lev;
            grid = make_cap_grid(lo, o);
        }
        auto curve = natural_psi(tail, grid, quad_spec(opt));
        if (opt.format == "json") {
            JsonValue j = JsonValue::object();
            j.set("tail", tail.name());
            j.set("p", JsonValue::array_of(curve.p));
            j.set("value", JsonValue::array_of(curve.value));
            j.set("rel_error", JsonValue::array_of(curve.rel_error));
            write_output(opt, j.dump(2));
        } else {
            write_output(opt, curve.csv());
        }
        return 0;
    });
}

int cmd_gls_norm(const CommonOptions& opt) {
    return guarded("gls-norm", [&] {
        json cfg = load_config(opt);
        auto tail = parse_tail(cfg);
        if (!cfg.contains("psi")) throw input_error("config needs a 'psi' descriptor");
        auto psi = psi_from_json(cfg["psi"].dump());
        auto grid = psi_grid(psi, grid_controls(cfg, opt));

        NormEstimate est;
        double crit = tail.moment_critical_p();
        bool beyond = false;
        for (double p : grid.points)
            if (p >= crit) {
                // the moment itself is infinite inside the support: that is a
                // divergence verdict, not a computation failure
                est.value = inf;
                est.diverged = true;
                est.method = "gls-grid-sup";
                est.witness = p;
                beyond = true;
                break;
            }
        if (!beyond) {
            while (!grid.points.empty() && grid.points.back() > crit - 1e-3)
                grid.points.pop_back(); // near-critical refusal band
            for (auto& off : grid.level_offsets)
                off = std::min(off, grid.points.size());
            if (grid.points.empty())
                throw input_error("no usable exponents below the moment critical order");
            est = gls_norm(natural_psi(tail, grid, quad_spec(opt)), psi);
        }
        write_output(opt, opt.format == "csv" ? estimate_csv(est) : estimate_json(est).dump(2));
        return 0;
    });
}

int cmd_bphi_norm(const CommonOptions& opt) {
    return guarded("bphi-norm", [&] {
        json cfg = load_config(opt);
        auto tail = parse_tail(cfg);
        if (!cfg.contains("phi")) throw input_error("config needs a 'phi' descriptor");
        auto phi = phi_from_json(cfg["phi"].dump());
        BphiOptions bo;
        bo.quadrature = quad_spec(opt);
        auto est = bphi_norm(tail, phi, lambda_grid(phi, grid_controls(cfg, opt)), bo);
        write_output(opt, opt.format == "csv" ? estimate_csv(est) : estimate_json(est).dump(2));
        return 0;
    });
}

int cmd_tail_bound(const CommonOptions& opt) {
    return guarded("tail-bound", [&] {
        json cfg = load_config(opt);
        TailFunction bound = [&] {
            if (cfg.contains("psi")) {
                auto psi = psi_from_json(cfg["psi"].dump());
                double v = number_field(cfg, "V", 1.0);
                GridControls g = grid_controls(cfg, opt);
                return g.untouched() ? gls_tail_bound(psi, v)
                                     : gls_tail_bound(psi, v, psi_grid(psi, g));
            }
            if (cfg.contains("phi")) {
                auto phi = phi_from_json(cfg["phi"].dump());
                return bphi_tail_bound(phi, number_field(cfg, "K", 1.0));
            }
            throw input_error("config needs a 'psi' (with V) or 'phi' (with K) descriptor");
        }();

        GridControls s = grid_controls(cfg, opt, "samples");
        double lo = std::isnan(s.lo) ? 1.0 : s.lo;
        double hi = std::isnan(s.hi) ? 1000.0 : s.hi;
        std::size_t n = s.points ? s.points : 181;
        if (!(hi > lo) || !(lo > 0.0) || n < 2)
            throw input_error("sample window needs 0 < lo < hi and >= 2 points");
        auto xs = geometric_points(lo, hi, n);

        if (opt.format == "json") {
            JsonValue j = JsonValue::object();
            j.set("name", bound.name());
            std::vector<double> vals, logs;
            for (double x : xs) {
                vals.push_back(bound(x));
                logs.push_back(bound.log_eval(x));
            }
            j.set("x", JsonValue::array_of(xs));
            j.set("value", JsonValue::array_of(vals));
            j.set("log_value", JsonValue::array_of(logs));
            write_output(opt, j.dump(2));
        } else {
            std::string text = "x, bound, ln_bound\n";
            for (double x : xs)
                text += JsonValue::format_number(x) + ", " +
                        JsonValue::format_number(bound(x)) + ", " +
                        JsonValue::format_number(bound.log_eval(x)) + "\n";
            write_output(opt, text);
        }
        return 0;
    });
}

int cmd_lorentz(const CommonOptions& opt) {
    return guarded("lorentz", [&] {
        json cfg = load_config(opt);
        auto tail = parse_tail(cfg);
        TailFunction bound = [&] {
            if (cfg.contains("bound")) return tail_from_json(cfg["bound"].dump());
            if (cfg.contains("psi"))
                return gls_tail_bound(psi_from_json(cfg["psi"].dump()),
                                      number_field(cfg, "V", 1.0));
            if (cfg.contains("phi"))
                return bphi_tail_bound(phi_from_json(cfg["phi"].dump()),
                                       number_field(cfg, "K", 1.0));
            throw input_error("config needs a 'bound', 'psi', or 'phi' entry");
        }();
        auto est = lorentz_quasinorm(tail, bound);
        write_output(opt, opt.format == "csv" ? estimate_csv(est) : estimate_json(est).dump(2));
        return 0;
    });
}

int cmd_counterexample(const CommonOptions& opt, const std::string& scenario) {
    return guarded("counterexample", [&] {
        json cfg = load_config(opt);
        CounterexampleOptions co = scenario_options(opt);
        CounterexampleReport rep;
        if (scenario == "A" || scenario == "B") {
            double b = number_field(cfg, "b", 3.0);
            double gamma = number_field(cfg, "gamma", 1.0);
            rep = scenario == "A" ? run_counterexample_A(b, gamma, co)
                                  : run_counterexample_B(b, gamma, co);
        } else if (scenario == "example1" || scenario == "example2" || scenario == "example3") {
            std::vector<std::pair<std::string, double>> params;
            for (const auto& [k, v] : cfg.items()) {
                if (!v.is_number())
                    throw input_error("scenario parameter '" + k + "' must be numeric");
                params.emplace_back(k, v.get<double>());
            }
            rep = run_example_equivalences(scenario.back() - '0', params, co);
        } else {
            throw input_error("unknown scenario '" + scenario +
                              "' (use A, B, example1, example2, example3)");
        }
        write_output(opt, opt.format == "csv" ? curves_csv(rep) : rep.to_json().dump(2));
        return rep.all_pass ? 0 : 1;
    });
}

int cmd_report(const CommonOptions& opt) {
    return guarded("report", [&] {
        CounterexampleOptions co = scenario_options(opt);
        std::vector<CounterexampleReport> reps;
        for (auto [b, g] : {std::pair{3.0, 1.0}, {2.0, 0.5}, {5.0, 2.0}}) {
            reps.push_back(run_counterexample_A(b, g, co));
            reps.push_back(run_counterexample_B(b, g, co));
        }
        reps.push_back(run_example_equivalences(1, {}, co));
        reps.push_back(run_example_equivalences(1, {{"m", 2.0}, {"a", 1.0}}, co));
        reps.push_back(run_example_equivalences(1, {{"m", 3.0}, {"a", 1.0}}, co));
        reps.push_back(run_example_equivalences(2, {}, co));
        reps.push_back(run_example_equivalences(2, {{"beta", 0.5}}, co));
        for (double m : {1.0, 2.0, 4.0})
            reps.push_back(run_example_equivalences(3, {{"m", m}}, co));

        std::size_t passed = 0;
        for (const auto& r : reps) passed += r.all_pass ? 1 : 0;
        bool all = passed == reps.size();

        if (opt.format == "csv") {
            std::string text = "scenario, item, kind, result\n";
            for (const auto& r : reps) {
                text += r.scenario + ", all, summary, " + (r.all_pass ? "pass" : "fail") + "\n";
                for (const auto& e : r.exponents)
                    text += r.scenario + ", " + e.name + ", exponent, " + e.verdict + "\n";
                for (const auto& m : r.memberships)
                    text += r.scenario + ", " + m.space + ", membership, " + m.verdict + "\n";
                for (const auto& a : r.assertions)
                    text += r.scenario + ", " + a.name + ", assertion, " +
                            (a.pass ? "pass" : "fail") + "\n";
            }
            write_output(opt, text);
        } else {
            JsonValue j = JsonValue::object();
            j.set("suite", "counterexamples");
            j.set("total", JsonValue(reps.size()));
            j.set("passed", JsonValue(passed));
            j.set("all_pass", JsonValue(all));
            JsonValue arr = JsonValue::array();
            for (const auto& r : reps) arr.push(r.to_json());
            j.set("reports", std::move(arr));
            write_output(opt, j.dump(2));
        }
        return all ? 0 : 1;
    });
}

} // namespace tailnorm::cli
