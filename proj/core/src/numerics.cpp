#include "tailnorm/numerics.hpp"
#include "tailnorm/grids.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numbers>

namespace tailnorm {

namespace {

[[noreturn]] void bad_eval(double x) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "integrand returned a non-finite value at x=%.6g", x);
    throw input_error(buf);
}

// Composite Simpson on [a, b] with doubling until the value stabilizes.
// Returns {value, error estimate}.
IntegralResult simpson_panel(const std::function<double(double)>& f,
                             double a, double b, double rel_tol, int max_refinements) {
    auto eval = [&](double x) {
        double v = f(x);
        if (std::isnan(v) || std::isinf(v)) bad_eval(x);
        return v;
    };
    std::size_t n = 8;
    double h = (b - a) / static_cast<double>(n);
    double ends = eval(a) + eval(b);
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double v = eval(a + h * static_cast<double>(i));
        (i % 2 ? odd : even) += v;
    }
    double s_prev = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    for (int r = 0; r < max_refinements; ++r) {
        // refine: all old interior points become "even", new midpoints "odd"
        even += odd;
        odd = 0.0;
        n *= 2;
        h *= 0.5;
        for (std::size_t i = 1; i < n; i += 2)
            odd += eval(a + h * static_cast<double>(i));
        double s = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        double err = std::abs(s - s_prev) / 15.0;
        if (err <= rel_tol * std::abs(s) + 1e-300)
            return {s, err};
        s_prev = s;
    }
    return {s_prev, std::abs(s_prev) * rel_tol * 16.0};
}

// Same in log space: returns ln of the panel integral.
LogIntegralResult log_simpson_panel(const std::function<double(double)>& log_f,
                                    double a, double b, double rel_tol, int max_refinements) {
    auto eval = [&](double x) {
        double v = log_f(x);
        if (std::isnan(v) || v == inf) bad_eval(x);
        return v;
    };
    std::size_t n = 16;
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g[i] = eval(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
    auto combine = [&]() {
        double m = -inf;
        for (double v : g) m = std::max(m, v);
        if (m == -inf) return -inf;
        double acc = 0.0;
        for (std::size_t i = 0; i <= g.size() - 1; ++i) {
            double w = (i == 0 || i == g.size() - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * std::exp(g[i] - m);
        }
        double h = (b - a) / static_cast<double>(g.size() - 1);
        return m + std::log(h / 3.0 * acc);
    };
    double s_prev = combine();
    for (int r = 0; r < max_refinements; ++r) {
        std::vector<double> g2(2 * (g.size() - 1) + 1);
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            g2[2 * i] = g[i];
            double xm = a + (b - a) * (static_cast<double>(i) + 0.5) / static_cast<double>(g.size() - 1);
            g2[2 * i + 1] = eval(xm);
        }
        g2.back() = g.back();
        g.swap(g2);
        double s = combine();
        if (s == -inf && s_prev == -inf) return {-inf, 0.0};
        double err = std::abs(std::expm1(s_prev - s));
        if (err <= rel_tol)
            return {s, err};
        s_prev = s;
    }
    return {s_prev, rel_tol * 16.0};
}

double detect_scale(const std::function<double(double)>& mass_log, double lower) {
    // crude mass probe: maximize ln|f(x)| + ln(x - lower) over geometric offsets
    double best = -inf, best_off = 1.0;
    for (int j = -24; j <= 48; ++j) {
        double off = std::ldexp(1.0, j);
        double v = mass_log(lower + off);
        if (std::isnan(v)) continue;
        v += std::log(off);
        if (v > best) { best = v; best_off = off; }
    }
    return best_off;
}

constexpr double golden_ratio_conj = 0.6180339887498949;

} // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0) || !(tail_threshold > 0) || max_refinements < 1 || max_panels < 4)
        throw input_error("invalid quadrature spec");
}

IntegralResult integrate_halfline(const std::function<double(double)>& f,
                                  const QuadratureSpec& spec,
                                  double scale_hint, double lower) {
    spec.validate();
    double scale = scale_hint > 0 ? scale_hint
                                  : detect_scale([&](double x) { return std::log(std::abs(f(x)) + 1e-300); }, lower);
    double total = 0.0, err = 0.0;
    double a = lower, w = scale / 4.0;
    int quiet = 0;
    for (int panel = 0; panel < spec.max_panels; ++panel) {
        IntegralResult r = simpson_panel(f, a, a + w, spec.rel_tol / 4.0, spec.max_refinements);
        total += r.value;
        err += r.error;
        a += w;
        w *= 2.0;
        quiet = std::abs(r.value) <= spec.tail_threshold * std::abs(total) ? quiet + 1 : 0;
        if (quiet >= 2 && panel >= 4)
            return {total, err};
    }
    throw convergence_error("half-line integral did not settle within the panel budget", total);
}

LogIntegralResult log_integrate_halfline(const std::function<double(double)>& log_f,
                                         const QuadratureSpec& spec,
                                         double scale_hint, double lower) {
    spec.validate();
    double scale = scale_hint > 0 ? scale_hint
                                  : detect_scale([&](double x) { return log_f(x); }, lower);
    double log_total = -inf, rel_err = 0.0;
    double a = lower, w = std::max(scale, 1e-280) / 4.0;
    int quiet = 0;
    for (int panel = 0; panel < spec.max_panels; ++panel) {
        LogIntegralResult r = log_simpson_panel(log_f, a, a + w, spec.rel_tol / 4.0, spec.max_refinements);
        double lt_new = log_sum_exp(log_total, r.log_value);
        rel_err += r.rel_error * std::exp(std::min(0.0, r.log_value - lt_new));
        log_total = lt_new;
        a += w;
        w *= 2.0;
        bool small = r.log_value == -inf ||
                     (log_total != -inf && r.log_value < log_total + std::log(spec.tail_threshold));
        quiet = small ? quiet + 1 : 0;
        if (quiet >= 2 && panel >= 4)
            return {log_total, rel_err};
    }
    throw convergence_error("half-line log-integral did not settle within the panel budget", log_total);
}

LogIntegralResult log_integrate_peaked(const std::function<double(double)>& log_f,
                                       const QuadratureSpec& spec, double lower) {
    spec.validate();
    MaxResult peak = maximize_concave(log_f, lower, inf, 1e-8);
    if (std::isinf(peak.value))
        throw convergence_error("log-integrand does not decay toward infinity", -inf);
    double y_star = peak.arg;
    // panel seeds: half-width at an e^-4 drop from the mode, one per side
    double wr = std::max(1e-8, std::abs(y_star) * 1e-10), wl = wr;
    while (y_star + wr < 1e290 && log_f(y_star + wr) > peak.value - 4.0) wr *= 2.0;
    while (y_star - wl > lower && log_f(y_star - wl) > peak.value - 4.0) wl *= 2.0;

    double log_total = -inf, rel_err = 0.0;
    auto accumulate = [&](const LogIntegralResult& r) {
        double lt_new = log_sum_exp(log_total, r.log_value);
        if (lt_new != -inf && r.log_value != -inf)
            rel_err += r.rel_error * std::exp(std::min(0.0, r.log_value - lt_new));
        log_total = lt_new;
    };
    auto panel_small = [&](const LogIntegralResult& r) {
        return r.log_value == -inf ||
               (log_total != -inf && r.log_value < log_total + std::log(spec.tail_threshold));
    };
    // Panels are clipped so the integrand falls at most drop_cap inside each one;
    // uniform Simpson refinement then settles in a few levels.  A panel is never
    // allowed to straddle the support edge: the edge is bisected instead, because
    // refining across a jump to -inf costs the whole 2^max_refinements budget.
    const double drop_cap = 8.0;

    { // right sweep
        double a = y_star, va = peak.value, pw = wr;
        double floor_w = std::max(wr * 1e-12, std::abs(y_star) * 4e-16);
        int quiet = 0, panel = 0;
        bool settled = false;
        for (; !settled && panel < spec.max_panels; ++panel) {
            if (va < peak.value - 700.0) { settled = true; break; } // below underflow scale
            double width = std::min(pw, 1e290 - a);
            double vb = log_f(a + width);
            while (width > floor_w && (vb == -inf || va - vb > drop_cap)) {
                width *= 0.5;
                vb = log_f(a + width);
            }
            if (vb == -inf) {
                double in = a, out = a + width;
                for (int i = 0; i < 90; ++i) {
                    double mid = 0.5 * (in + out);
                    (log_f(mid) == -inf ? out : in) = mid;
                }
                if (in > a)
                    accumulate(log_simpson_panel(log_f, a, in, spec.rel_tol / 4.0,
                                                 spec.max_refinements));
                settled = true;
                break;
            }
            LogIntegralResult r =
                log_simpson_panel(log_f, a, a + width, spec.rel_tol / 4.0, spec.max_refinements);
            accumulate(r);
            quiet = panel_small(r) ? quiet + 1 : 0;
            a += width;
            va = vb;
            pw = width * 2.0;
            if (quiet >= 2 && panel >= 4) settled = true;
        }
        if (!settled)
            throw convergence_error("peaked log-integral did not settle within the panel budget",
                                    log_total);
    }
    { // left sweep, down to the boundary.  The panel start is tracked as a
      // point, not a width: b - width can round back onto `lower` itself and
      // resample whatever discontinuity the caller pulled `lower` away from.
        double b = y_star, vb = peak.value, pw = wl;
        double floor_w = std::max(wl * 1e-12, std::abs(y_star) * 4e-16);
        int quiet = 0, panel = 0;
        bool settled = !(b > lower);
        for (; !settled && panel < spec.max_panels; ++panel) {
            if (vb < peak.value - 700.0) { settled = true; break; }
            double a2 = std::max(lower, b - pw);
            double va = log_f(a2);
            while (b - a2 > floor_w && (va == -inf || vb - va > drop_cap)) {
                a2 = std::max(lower, b - 0.5 * (b - a2));
                va = log_f(a2);
            }
            if (va == -inf) {
                double out = a2, in = b;
                for (int i = 0; i < 90; ++i) {
                    double mid = 0.5 * (in + out);
                    (log_f(mid) == -inf ? out : in) = mid;
                }
                if (in < b)
                    accumulate(log_simpson_panel(log_f, in, b, spec.rel_tol / 4.0,
                                                 spec.max_refinements));
                settled = true;
                break;
            }
            LogIntegralResult r =
                log_simpson_panel(log_f, a2, b, spec.rel_tol / 4.0, spec.max_refinements);
            accumulate(r);
            quiet = panel_small(r) ? quiet + 1 : 0;
            pw = (b - a2) * 2.0;
            b = a2;
            vb = va;
            if (!(b > lower) || (quiet >= 2 && panel >= 4)) settled = true;
        }
        if (!settled)
            throw convergence_error("peaked log-integral did not settle within the panel budget",
                                    log_total);
    }
    return {log_total, rel_err};
}

MaxResult maximize_concave(const std::function<double(double)>& g,
                           double lo, double hi, double arg_tol_rel) {
    auto eval = [&](double x) {
        double v = g(x);
        if (std::isnan(v)) throw input_error("objective returned NaN during maximization");
        return v;
    };
    double a = lo, b = hi;
    if (std::isinf(hi)) {
        // expand until the objective decays; concavity makes this a bracket
        double step = std::max(1.0, std::abs(lo)) * 0.5;
        double x_prev = lo, v_prev = eval(lo);
        double x = lo + step;
        int expansions = 0;
        for (;;) {
            double v = eval(x);
            if (v < v_prev) { b = x; break; }
            x_prev = x; v_prev = v;
            step *= 2.0;
            x += step;
            if (++expansions > 400)
                return {inf, inf, true}; // unbounded supremum
        }
        a = std::max(lo, 2.0 * x_prev - b); // one step back from the last rise
    }
    double span0 = b - a;
    if (!(span0 > 0)) throw input_error("empty maximization bracket");
    double x1 = b - golden_ratio_conj * (b - a);
    double x2 = a + golden_ratio_conj * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    double tol = std::max(arg_tol_rel * span0, 4e-16 * (std::abs(a) + std::abs(b)));
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + golden_ratio_conj * (b - a);
            f2 = eval(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - golden_ratio_conj * (b - a);
            f1 = eval(x1);
        }
    }
    double arg = f1 > f2 ? x1 : x2;
    double val = std::max(f1, f2);
    // endpoints can carry the supremum; keep them in play
    double v_lo = eval(lo);
    bool on_boundary = false;
    if (v_lo >= val) { arg = lo; val = v_lo; on_boundary = true; }
    if (!std::isinf(hi)) {
        double v_hi = eval(hi);
        if (v_hi >= val) { arg = hi; val = v_hi; on_boundary = true; }
    }
    if (!on_boundary)
        on_boundary = (arg - lo) <= 2.0 * tol || (!std::isinf(hi) && (hi - arg) <= 2.0 * tol);
    return {arg, val, on_boundary};
}

double bisect_root(const std::function<double(double)>& f,
                   double lo, double hi, double x_tol_rel) {
    double flo = f(lo), fhi = f(hi);
    if (std::isnan(flo) || std::isnan(fhi)) throw input_error("bisection endpoint is NaN");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw input_error("bisection endpoints have equal sign");
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) { lo = mid; flo = fm; }
        else hi = mid;
        if (hi - lo <= x_tol_rel * (std::abs(lo) + std::abs(hi)))
            break;
    }
    return 0.5 * (lo + hi);
}

double bisect_increasing_predicate(const std::function<bool(double)>& pred,
                                   double lo, double hi, double x_tol_rel) {
    if (pred(lo)) return lo;
    if (!pred(hi)) throw input_error("predicate false at the upper bracket end");
    while (hi - lo > x_tol_rel * hi) {
        double mid = 0.5 * (lo + hi);
        (pred(mid) ? hi : lo) = mid;
    }
    return hi; // certified end of the bracket
}

SlopeFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 4)
        throw input_error("slope fit needs at least 4 matching points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0) throw input_error("slope fit abscissae are degenerate");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    fit.n = x.size();
    return fit;
}

SlopeFit fit_loglog_slope(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size() || u.size() < 4)
        throw input_error("log-log fit needs at least 4 matching points");
    bool incr = u[1] > u[0];
    std::vector<double> lu(u.size()), lv(v.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0) || !(v[i] > 0))
            throw input_error("log-log fit requires strictly positive samples");
        if (i > 0 && ((incr && u[i] <= u[i - 1]) || (!incr && u[i] >= u[i - 1])))
            throw input_error("log-log fit abscissae must be strictly monotone");
        lu[i] = std::log(u[i]);
        lv[i] = std::log(v[i]);
    }
    return fit_line(lu, lv);
}

double log_gamma_fn(double x) {
    if (!(x > 0)) throw input_error("log_gamma_fn requires x > 0");
    if (x < 0.5) return log_gamma_fn(x + 1.0) - std::log(x);
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,      12.507343278686905,
        -0.13857109526572012,       9.9843695780195716e-6,  1.5056327351493116e-7};
    double z = x - 1.0;
    double sum = c[0];
    for (std::size_t i = 1; i < c.size(); ++i)
        sum += c[i] / (z + static_cast<double>(i));
    double t = z + 7.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double gamma_fn(double x) { return std::exp(log_gamma_fn(x)); }

double log_sum_exp(double a, double b) {
    if (a == -inf) return b;
    if (b == -inf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

std::vector<double> geometric_points(double lo, double hi, std::size_t n) {
    if (!(lo > 0) || !(hi > lo) || n < 2)
        throw input_error("geometric_points requires 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linear_points(double lo, double hi, std::size_t n) {
    if (!(hi > lo) || n < 2)
        throw input_error("linear_points requires lo < hi and n >= 2");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = hi;
    return out;
}

LeveledGrid make_pole_grid(double lo, double b, const PoleGridOptions& opt) {
    if (!(b > lo)) throw input_error("pole grid requires lo < b");
    if (opt.points_per_level < 4 || opt.levels < 1 || !(opt.first_gap > 0) ||
        !(opt.gap_ratio > 0) || !(opt.gap_ratio < 1))
        throw input_error("invalid pole grid options");
    LeveledGrid grid;
    double span = b - lo;
    double gap_hi = span; // current outer edge of the level, as a gap from b
    for (std::size_t level = 0; level < opt.levels; ++level) {
        double gap_lo = opt.first_gap * std::pow(opt.gap_ratio, static_cast<double>(level)) * span;
        // geometric in the gap b - p, descending gap = ascending p
        auto gaps = geometric_points(gap_lo, gap_hi, opt.points_per_level);
        for (auto it = gaps.rbegin(); it != gaps.rend(); ++it) {
            double p = b - *it;
            if (!grid.points.empty() && p <= grid.points.back()) continue;
            grid.points.push_back(p);
        }
        grid.level_offsets.push_back(grid.points.size());
        gap_hi = gap_lo;
    }
    return grid;
}

LeveledGrid make_cap_grid(double lo, const CapGridOptions& opt) {
    if (!(lo > 0) || opt.points_per_level < 4 || opt.levels < 1 ||
        !(opt.first_cap > lo) || !(opt.cap_ratio > 1))
        throw input_error("invalid cap grid options");
    LeveledGrid grid;
    double cap_lo = lo;
    for (std::size_t level = 0; level < opt.levels; ++level) {
        double cap = opt.first_cap * std::pow(opt.cap_ratio, static_cast<double>(level));
        auto pts = geometric_points(cap_lo, cap, opt.points_per_level);
        for (double p : pts) {
            if (!grid.points.empty() && p <= grid.points.back()) continue;
            grid.points.push_back(p);
        }
        grid.level_offsets.push_back(grid.points.size());
        cap_lo = cap;
    }
    return grid;
}

LeveledGrid make_closed_grid(double lo, double hi, std::size_t n) {
    LeveledGrid grid;
    grid.points = lo > 0 ? geometric_points(lo, hi, n) : linear_points(lo, hi, n);
    grid.level_offsets.push_back(grid.points.size());
    return grid;
}

} // namespace tailnorm
