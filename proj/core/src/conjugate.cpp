#include "tailnorm/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace tailnorm {

namespace {

double pulled_in_end(const ConvexDomain& dom) {
    if (dom.closed_end || std::isinf(dom.end)) return dom.end;
    // stay strictly off an open end (typically a pole of f)
    return dom.end - std::max(1e-12, std::abs(dom.end)) * 1e-12;
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

ConjugatePoint conjugate_value(const std::function<double(double)>& f,
                               const ConvexDomain& dom, double x,
                               double warm_lo) {
    if (!(dom.end > dom.lo)) throw input_error("conjugate domain is empty");
    double hi = pulled_in_end(dom);
    double lo = std::clamp(warm_lo, dom.lo, hi);
    auto g = [&](double l) { return l * x - f(l); };
    ConjugatePoint out;
    if (lo >= hi) {
        out.value = g(hi);
        out.argmax = hi;
        out.attained = dom.closed_end;
        return out;
    }
    MaxResult m = maximize_concave(g, lo, hi, 1e-12);
    if (std::isinf(m.value)) {
        out.value = inf;
        out.argmax = inf;
        out.attained = false;
        return out;
    }
    out.value = m.value;
    out.argmax = m.arg;
    out.attained = true;
    if (m.on_boundary && !dom.closed_end && std::isfinite(dom.end)) {
        double span = hi - dom.lo;
        if (dom.end - m.arg < 1e-9 * span) out.attained = false; // sup runs into the pole
    }
    return out;
}

SampledConvexFunction::SampledConvexFunction(std::string name,
                                             std::function<double(double)> eval,
                                             ConvexDomain dom,
                                             std::vector<double> grid)
    : name_(std::move(name)), eval_(std::move(eval)), dom_(dom), grid_(std::move(grid)) {
    if (grid_.size() < 2) throw input_error("convex sample needs at least two grid points");
    if (!std::is_sorted(grid_.begin(), grid_.end()))
        throw input_error("convex sample grid must be ascending");
    if (grid_.front() < dom_.lo || grid_.back() > dom_.end)
        throw input_error("convex sample grid leaves the domain");
    values_.reserve(grid_.size());
    for (double x : grid_) values_.push_back(eval_(x));
    check_convexity();
}

SampledConvexFunction::SampledConvexFunction(std::string name,
                                             std::vector<double> grid,
                                             std::vector<double> values,
                                             ConvexDomain dom)
    : name_(std::move(name)), dom_(dom), grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2 || grid_.size() != values_.size())
        throw input_error("convex sample needs matching grids and values");
    if (!std::is_sorted(grid_.begin(), grid_.end()))
        throw input_error("convex sample grid must be ascending");
    check_convexity();
}

void SampledConvexFunction::check_convexity() const {
    // finite prefix then (optionally) an infinite tail; slopes nondecreasing
    bool seen_inf = false;
    double prev_slope = -inf, slope_scale = 1.0;
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (std::isinf(values_[i])) { seen_inf = true; continue; }
        if (seen_inf)
            throw construction_error("convex sample '" + name_ +
                                     "': finite value after an infinite one");
        if (std::isnan(values_[i]))
            throw construction_error("convex sample '" + name_ + "': NaN value");
        double s = (values_[i] - values_[i - 1]) / (grid_[i] - grid_[i - 1]);
        slope_scale = std::max(slope_scale, std::abs(s));
        if (s < prev_slope - 1e-9 * slope_scale)
            throw construction_error("convex sample '" + name_ +
                                     "' fails the convexity check near x=" +
                                     std::to_string(grid_[i]));
        prev_slope = s;
    }
}

double SampledConvexFunction::operator()(double x) const {
    if (eval_) return eval_(x);
    auto it = std::lower_bound(grid_.begin(), grid_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    if (i == 0) i = 1;
    if (i == grid_.size()) i = grid_.size() - 1;
    double x0 = grid_[i - 1], x1 = grid_[i];
    double v0 = values_[i - 1], v1 = values_[i];
    if (std::isinf(v1)) return x >= x1 ? inf : v0; // step into the infinite tail
    return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
}

bool SampledConvexFunction::has_infinite_values() const {
    return std::any_of(values_.begin(), values_.end(),
                       [](double v) { return std::isinf(v); });
}

std::string SampledConvexFunction::csv() const {
    std::string out = "x,f_star\n";
    for (std::size_t i = 0; i < grid_.size(); ++i)
        out += fmt(grid_[i]) + "," + fmt(values_[i]) + "\n";
    return out;
}

SampledConvexFunction conjugate(const std::function<double(double)>& f,
                                const ConvexDomain& dom,
                                const std::vector<double>& x_grid,
                                const std::string& name) {
    if (x_grid.size() < 2) throw input_error("conjugate grid needs at least two points");
    if (!std::is_sorted(x_grid.begin(), x_grid.end()) || x_grid.front() < 0)
        throw input_error("conjugate grid must be ascending and nonnegative");
    SampledConvexFunction out;
    out.name_ = name;
    out.dom_ = ConvexDomain{0.0, inf, false};
    out.grid_ = x_grid;
    out.values_.reserve(x_grid.size());
    out.argmax_.reserve(x_grid.size());
    double warm = dom.lo;
    bool unbounded = false;
    for (double x : x_grid) {
        if (unbounded) {
            out.values_.push_back(inf);
            out.argmax_.push_back(inf);
            continue;
        }
        ConjugatePoint p = conjugate_value(f, dom, x, warm);
        if (std::isinf(p.value)) {
            unbounded = true; // larger x only grows the supremum further
            out.values_.push_back(inf);
            out.argmax_.push_back(inf);
            continue;
        }
        out.values_.push_back(p.value);
        out.argmax_.push_back(p.argmax);
        warm = std::max(dom.lo, p.argmax * (1.0 - 1e-3) - 1e-12);
    }
    auto fcopy = f;
    auto dcopy = dom;
    out.eval_ = [fcopy, dcopy](double x) { return conjugate_value(fcopy, dcopy, x).value; };
    try {
        out.check_convexity();
    } catch (const construction_error& e) {
        throw construction_error(std::string("conjugate bracket failure, input not convex? ") +
                                 e.what());
    }
    return out;
}

SampledConvexFunction conjugate(const SampledConvexFunction& f,
                                const std::vector<double>& x_grid) {
    // the result's eval closure outlives f: hold a copy
    auto base = std::make_shared<SampledConvexFunction>(f);
    return conjugate([base](double l) { return (*base)(l); }, f.domain(), x_grid,
                     f.name() + "*");
}

double fenchel_moreau_check(const SampledConvexFunction& f, std::size_t u_points) {
    const auto& g = f.grid();
    const auto& v = f.values();
    double u_hi = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (std::isinf(v[i])) break;
        u_hi = std::max(u_hi, (v[i] - v[i - 1]) / (g[i] - g[i - 1]));
    }
    if (!(u_hi > 0)) throw input_error("fenchel_moreau_check: no positive slope to probe");

    std::size_t half = std::max<std::size_t>(u_points / 2, 16);
    std::vector<double> u{0.0};
    for (double x : geometric_points(u_hi * 1e-8, u_hi, half)) u.push_back(x);
    for (double x : linear_points(u_hi / static_cast<double>(half), u_hi, half)) u.push_back(x);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());

    std::vector<double> fs(u.size());
    double warm = f.domain().lo;
    for (std::size_t j = 0; j < u.size(); ++j) {
        ConjugatePoint p = conjugate_value([&f](double l) { return f(l); }, f.domain(),
                                           u[j], warm);
        fs[j] = p.value;
        if (std::isfinite(p.argmax)) warm = std::max(f.domain().lo, p.argmax * (1.0 - 1e-3));
    }

    // second transform at the original abscissas: vertex maximum over the
    // piecewise-linear f*, maximizer index nondecreasing in x
    double worst = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g[i];
        if (x <= f.domain().lo || x >= f.domain().end) continue;
        if (std::isinf(v[i])) continue;
        auto score = [&](std::size_t k) { return x * u[k] - fs[k]; };
        while (j + 1 < u.size() && score(j + 1) >= score(j)) ++j;
        while (j > 0 && score(j - 1) > score(j)) --j; // x-grid need not ascend from 0
        worst = std::max(worst, std::abs(score(j) - v[i]));
    }
    return worst;
}

DerivativeResult conjugate_derivative(const SampledConvexFunction& f_star, double x) {
    const auto& g = f_star.grid();
    const auto& v = f_star.values();
    std::size_t n_finite = 0;
    while (n_finite < v.size() && std::isfinite(v[n_finite])) ++n_finite;
    if (n_finite < 2) throw input_error("derivative needs two finite grid values");
    if (x < g.front() || x > g[n_finite - 1])
        throw input_error("derivative argument outside the sampled grid");

    auto it = std::lower_bound(g.begin(), g.begin() + n_finite, x);
    std::size_t c = static_cast<std::size_t>(it - g.begin());
    if (c > 0 && (c == n_finite || x - g[c - 1] < g[c] - x)) --c; // nearest vertex
    DerivativeResult out;
    if (c == 0 || c + 1 >= n_finite) {
        // grid edge: secant through the two nearest finite vertices
        std::size_t i = c == 0 ? 1 : n_finite - 1;
        out.value = (v[i] - v[i - 1]) / (g[i] - g[i - 1]);
        out.one_sided = true;
        return out;
    }
    double x0 = g[c - 1], x1 = g[c], x2 = g[c + 1];
    double d0 = (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    double d1 = (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
    double d2 = (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    out.value = v[c - 1] * d0 + v[c] * d1 + v[c + 1] * d2;
    return out;
}

} // namespace tailnorm
