#include "tailnorm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tailnorm {

namespace {

double log_sinh(double u) {
    if (u < 1e-8) return std::log(u);
    if (u < 30.0) return std::log(std::sinh(u));
    return u - std::log(2.0) + std::log1p(-std::exp(-2.0 * u));
}

double log_cosh(double u) {
    if (u < 30.0) return std::log(std::cosh(u));
    return u - std::log(2.0) + std::log1p(std::exp(-2.0 * u));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

MomentPoint moment_with_error(const TailFunction& tail, double p,
                              const QuadratureSpec& spec) {
    if (!(p >= 1.0)) throw input_error("moment order must satisfy p >= 1");
    double crit = tail.moment_critical_p();
    if (std::isfinite(crit)) {
        if (p >= crit)
            throw divergence_error("moment integral diverges: p >= critical exponent " +
                                       fmt(crit) + " of tail '" + tail.name() + "'",
                                   crit);
        if (p > crit - 1e-3)
            throw input_error("moment order within 1e-3 of the critical exponent " +
                              fmt(crit) + "; refusing the near-pole evaluation");
    }
    // integrate in y = ln x: p e^{py} T(e^y) is unimodal with a smooth peak
    // for every family, and the near-pole far tail e^{-(crit-p)y} stays
    // reachable by geometric panels
    double x0 = tail.x0();
    double y0, log_atom;
    MomentPoint out;
    if (x0 > 0) {
        // the flat T = 1 stretch contributes exactly x0^p; start on the open
        // side of ln x0 so a survival jump at x0 never lands inside a panel
        log_atom = p * std::log(x0);
        y0 = std::nextafter(std::log(x0), inf);
        if (tail.log_eval_ln(y0) == -inf) {
            out.value = x0; // point mass only
            out.rel_error = 0.0;
            return out;
        }
    } else {
        // cut below a point whose sub-integral is ~1e-15 of the total
        double x_ref = tail.quantile_below(0.5);
        y0 = std::log(x_ref) - (14.0 * std::log(10.0) + 2.0) / p;
        log_atom = -inf;
    }
    LogIntegralResult li = log_integrate_peaked(
        [&](double y) { return p * y + tail.log_eval_ln(y); }, spec, y0);
    li.log_value += std::log(p);
    double log_e = log_sum_exp(log_atom, li.log_value);
    out.value = std::exp(log_e / p);
    out.rel_error = std::max(1e-15, li.rel_error / p);
    return out;
}

double moment(const TailFunction& tail, double p, const QuadratureSpec& spec) {
    return moment_with_error(tail, p, spec).value;
}

std::string MomentCurve::csv() const {
    std::string out = "p,moment,err\n";
    for (std::size_t i = 0; i < p.size(); ++i)
        out += fmt(p[i]) + "," + fmt(value[i]) + "," + fmt(rel_error[i]) + "\n";
    return out;
}

MomentCurve natural_psi(const TailFunction& tail, const std::vector<double>& p_grid,
                        const QuadratureSpec& spec) {
    if (p_grid.empty()) throw input_error("natural_psi needs a nonempty p grid");
    if (!std::is_sorted(p_grid.begin(), p_grid.end()))
        throw input_error("natural_psi p grid must be ascending");
    MomentCurve curve;
    curve.p = p_grid;
    curve.value.reserve(p_grid.size());
    curve.rel_error.reserve(p_grid.size());
    for (double p : p_grid) {
        MomentPoint m = moment_with_error(tail, p, spec);
        curve.value.push_back(m.value);
        curve.rel_error.push_back(m.rel_error);
    }
    return curve;
}

MomentCurve natural_psi(const TailFunction& tail, const LeveledGrid& p_grid,
                        const QuadratureSpec& spec) {
    MomentCurve curve = natural_psi(tail, p_grid.points, spec);
    curve.level_offsets = p_grid.level_offsets;
    return curve;
}

MgfValue mgf(const TailFunction& tail, double lambda, const QuadratureSpec& spec) {
    MgfValue out;
    out.critical = tail.mgf_critical_lambda();
    double l = std::abs(lambda); // symmetrized variable: even in lambda
    if (l == 0.0) return out;
    if (l >= out.critical) {
        out.diverged = true;
        out.value = inf;
        out.log_value = inf;
        return out;
    }
    // E cosh(l|z|) = cosh(l x0) + l int_{x0}^inf sinh(l x) T(x) dx: the flat
    // T = 1 stretch is summed in closed form, and the remainder runs on the
    // open side of x0 so a survival jump there never lands inside a panel
    double x0 = tail.x0();
    double log_base = x0 > 0 ? log_cosh(l * x0) : 0.0;
    double y_lo = x0 > 0 ? std::nextafter(std::log(x0), inf) : -745.0;
    if (x0 > 0 && tail.log_eval_ln(y_lo) == -inf) {
        out.log_value = log_base; // point mass only
        out.value = std::exp(out.log_value);
        return out;
    }
    LogIntegralResult li = log_integrate_peaked(
        [&](double y) {
            double x = std::exp(y);
            return std::log(l) + log_sinh(l * x) + y + tail.log_eval_ln(y);
        },
        spec, y_lo);
    out.log_value = log_sum_exp(log_base, li.log_value);
    out.value = std::exp(out.log_value);
    return out;
}

CramerResult cramer_check(const TailFunction& tail, const std::vector<double>& mu_grid) {
    if (mu_grid.empty()) throw input_error("cramer_check needs candidate mu values");
    auto check = geometric_points(1e-6, 1e8, 2500);
    CramerResult best;
    double largest = *std::max_element(mu_grid.begin(), mu_grid.end());
    for (double mu : mu_grid) {
        if (!(mu > 0)) throw input_error("cramer candidates must be positive");
        bool ok = true;
        for (double y : check) {
            if (tail.log_eval(y) > -mu * y + 1e-12 * (1.0 + mu * y)) {
                ok = false;
                if (mu == largest) best.witness = y;
                break;
            }
        }
        if (ok && (!best.satisfied || mu > best.mu)) {
            best.satisfied = true;
            best.mu = mu;
        }
    }
    if (best.satisfied) best.witness.reset();
    return best;
}

} // namespace tailnorm
