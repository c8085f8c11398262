#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "tailnorm/grids.hpp"
#include "tailnorm/numerics.hpp"
#include "test_util.hpp"

using namespace tailnorm;

TEST_CASE("halfline quadrature reproduces the exponential integral") {
    auto r = integrate_halfline([](double x) { return std::exp(-x); });
    CHECK_REL(r.value, 1.0, 1e-10);
    CHECK(r.error < 1e-8);
}

TEST_CASE("halfline quadrature matches gamma moments") {
    // oracle: E x^{p-1} e^{-x} over [0, inf) = Gamma(p), via the C runtime
    for (double p : {1.5, 2.5, 4.0, 7.5}) {
        auto r = integrate_halfline([p](double x) { return std::pow(x, p - 1.0) * std::exp(-x); },
                                    {}, p);
        CHECK_REL(r.value, std::tgamma(p), 1e-9);
    }
}

TEST_CASE("halfline quadrature handles the log-pole kernel") {
    // oracle: int_1^inf x^{p-1-b} (ln x)^g dx = Gamma(g+1)/(b-p)^{g+1}
    const double b = 3.0, p = 2.0, g = 1.0;
    auto r = integrate_halfline(
        [=](double x) { return std::pow(x, p - 1.0 - b) * std::pow(std::log(x), g); },
        {}, 2.0, 1.0);
    CHECK_REL(r.value, std::tgamma(g + 1.0) / std::pow(b - p, g + 1.0), 1e-9);

    // same integral in y = ln x coordinates, where the slow decay lives
    auto ry = integrate_halfline(
        [=](double y) { return std::exp((p - b) * y) * std::pow(y, g); }, {}, 1.0, 0.0);
    CHECK_REL(ry.value, 1.0, 1e-9);
}

TEST_CASE("log-space quadrature survives astronomically scaled integrands") {
    // ln int_0^inf x^{p-1} e^{-x} dx = lgamma(p) for p = 1000; the linear
    // integrand peaks near e^{5900} and must be accumulated in log space.
    const double p = 1000.0;
    auto r = log_integrate_halfline(
        [=](double x) { return x > 0 ? (p - 1.0) * std::log(x) - x : -inf; }, {}, p);
    CHECK_REL(r.log_value, std::lgamma(p), 1e-10);

    // scaling by e^{200} shifts the log integral exactly
    auto rs = log_integrate_halfline(
        [=](double x) { return x > 0 ? 200.0 + (p - 1.0) * std::log(x) - x : -inf; }, {}, p);
    CHECK_REL(rs.log_value, std::lgamma(p) + 200.0, 1e-10);
}

TEST_CASE("log-space quadrature agrees with the linear one on moderate data") {
    auto lin = integrate_halfline([](double x) { return std::exp(-0.5 * x * x); });
    auto lg = log_integrate_halfline([](double x) { return -0.5 * x * x; });
    CHECK_REL(std::exp(lg.log_value), lin.value, 1e-9);
    CHECK_REL(lin.value, std::sqrt(2.0 * std::acos(-1.0)) / 2.0, 1e-9);
}

TEST_CASE("quadrature rejects non-finite integrands") {
    CHECK_THROWS_AS(integrate_halfline([](double x) { return 1.0 / (x - 1.0); }),
                    input_error);
}

TEST_CASE("concave maximization finds quadratic vertices") {
    auto r = maximize_concave([](double l) { return -(l - 2.0) * (l - 2.0) + 3.0; }, 0.0, 10.0);
    CHECK(std::abs(r.arg - 2.0) < 1e-7);
    CHECK_REL(r.value, 3.0, 1e-12);
    CHECK_FALSE(r.on_boundary);
}

TEST_CASE("concave maximization matches the stationary point of the log-pole payoff") {
    // d/dl [ l x - g ln(b/(b-l)) ] = 0  =>  l* = b - g/x ; b=3, g=1, x=2 gives 2.5
    const double b = 3.0, g = 1.0, x = 2.0;
    auto r = maximize_concave(
        [=](double l) { return l * x - g * std::log(b / (b - l)); }, 0.0, b - 1e-12);
    CHECK(std::abs(r.arg - 2.5) < 1e-7);
    CHECK_REL(r.value, 5.0 - std::log(6.0), 1e-10);
}

TEST_CASE("concave maximization expands over the half line") {
    auto r = maximize_concave([](double l) { return -(l - 37.5) * (l - 37.5); }, 0.0, inf);
    CHECK(std::abs(r.arg - 37.5) < 1e-6);

    // linear growth has no finite maximizer
    auto u = maximize_concave([](double l) { return 2.0 * l; }, 0.0, inf);
    CHECK(u.value == inf);
    CHECK(u.on_boundary);
}

TEST_CASE("concave maximization reports boundary suprema") {
    auto r = maximize_concave([](double l) { return 3.0 * l; }, 1.0, 2.0);
    CHECK(r.on_boundary);
    CHECK_REL(r.value, 6.0, 1e-12);
    CHECK_REL(r.arg, 2.0, 1e-12);
}

TEST_CASE("concave maximization over random vertices") {
    std::mt19937_64 rng(20260823u);
    std::uniform_real_distribution<double> vertex(0.2, 50.0), curv(0.05, 8.0);
    for (int i = 0; i < 40; ++i) {
        double v = vertex(rng), a = curv(rng);
        auto r = maximize_concave([=](double l) { return -a * (l - v) * (l - v) + 1.0; },
                                  0.0, 60.0);
        CHECK(std::abs(r.arg - v) < 1e-6 * (1.0 + v));
    }
}

TEST_CASE("root bisection") {
    double r = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK_REL(r, std::sqrt(2.0), 1e-12);
    CHECK_THROWS_AS(bisect_root([](double x) { return x * x + 1.0; }, 0.0, 2.0), input_error);
}

TEST_CASE("increasing-predicate bisection certifies the upper end") {
    double thr = 0.7531;
    double r = bisect_increasing_predicate([=](double t) { return t >= thr; }, 0.0, 4.0, 1e-9);
    CHECK(r >= thr);
    CHECK(r <= thr * (1.0 + 1e-7) + 1e-7);
}

TEST_CASE("log-log slope fit is exact on pure power laws") {
    std::vector<double> u, v;
    for (double x = 1.0; x <= 200.0; x *= 1.5) {
        u.push_back(x);
        v.push_back(std::pow(x, -2.5));
    }
    auto fit = fit_loglog_slope(u, v);
    CHECK(std::abs(fit.slope + 2.5) < 1e-12);
    CHECK(fit.residual_rms < 1e-12);
}

TEST_CASE("log-log slope fit tolerates small relative noise") {
    std::mt19937_64 rng(7u);
    std::uniform_real_distribution<double> noise(-1e-6, 1e-6);
    std::vector<double> u, v;
    for (double x = 1.0; x <= 1000.0; x *= 1.3) {
        u.push_back(x);
        v.push_back(std::pow(x, 1.75) * (1.0 + noise(rng)));
    }
    auto fit = fit_loglog_slope(u, v);
    CHECK(std::abs(fit.slope - 1.75) < 1e-4);
}

TEST_CASE("log-log slope fit validates its input") {
    std::vector<double> u{1.0, 2.0, 3.0}, v{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(fit_loglog_slope(u, v), input_error);
    std::vector<double> u2{1.0, 2.0, 2.0, 3.0}, v2{1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(fit_loglog_slope(u2, v2), input_error);
    std::vector<double> u3{1.0, 2.0, -3.0, 4.0};
    CHECK_THROWS_AS(fit_loglog_slope(u3, v2), input_error);
}

TEST_CASE("gamma function against the C runtime") {
    CHECK_REL(gamma_fn(0.5), std::sqrt(std::acos(-1.0)), 1e-12);
    CHECK_REL(gamma_fn(1.0), 1.0, 1e-13);
    CHECK_REL(gamma_fn(2.0), 1.0, 1e-13);
    CHECK_REL(gamma_fn(5.0), 24.0, 1e-13);
    for (double x = 0.5; x <= 50.0; x += 0.7)
        CHECK_REL(log_gamma_fn(x), std::lgamma(x), 1e-12);
    CHECK_THROWS_AS(gamma_fn(-1.0), input_error);
}

TEST_CASE("log_sum_exp") {
    CHECK_REL(log_sum_exp(0.0, 0.0), std::log(2.0), 1e-14);
    CHECK_REL(log_sum_exp(1000.0, 1000.0), 1000.0 + std::log(2.0), 1e-14);
    CHECK(log_sum_exp(-inf, 3.0) == 3.0);
    CHECK(log_sum_exp(-inf, -inf) == -inf);
}

TEST_CASE("pole grids accumulate toward the endpoint by level") {
    auto grid = make_pole_grid(1.0, 3.0, {.points_per_level = 40, .levels = 3});
    REQUIRE(grid.levels() == 3);
    CHECK(grid.points.front() == 1.0);
    // level k ends at gap 8e-3 * 2^{-k} * (b - lo)
    for (std::size_t k = 0; k < 3; ++k) {
        double gap = 3.0 - grid.points[grid.level_offsets[k] - 1];
        CHECK_REL(gap, 8e-3 * std::pow(0.5, static_cast<double>(k)) * 2.0, 1e-9);
    }
    for (std::size_t i = 1; i < grid.points.size(); ++i)
        CHECK(grid.points[i] > grid.points[i - 1]);
}

TEST_CASE("cap grids double their endpoint by level") {
    auto grid = make_cap_grid(1.0, {.points_per_level = 30, .levels = 3, .first_cap = 250.0});
    REQUIRE(grid.levels() == 3);
    CHECK_REL(grid.points[grid.level_offsets[0] - 1], 250.0, 1e-12);
    CHECK_REL(grid.points[grid.level_offsets[1] - 1], 500.0, 1e-12);
    CHECK_REL(grid.points[grid.level_offsets[2] - 1], 1000.0, 1e-12);
}
