#include <cmath>
#include <random>

#include <doctest.h>

#include "tailnorm/conjugate.hpp"
#include "test_util.hpp"

using namespace tailnorm;

namespace {

double quad(double l) { return 0.5 * l * l; }
double quartic(double l) { return 0.25 * l * l * l * l; }
// log-pole family: value gamma*ln(b/(b-l)) with b=3, gamma=1
double logpole(double l) { return std::log(3.0 / (3.0 - l)); }
double logpole_conj(double x) { return 3.0 * x - 1.0 - std::log(3.0 * x); }

const ConvexDomain half_line{0.0, inf, false};
const ConvexDomain pole_dom{0.0, 3.0, false};

} // namespace

TEST_CASE("quadratic is self-conjugate") {
    auto p = conjugate_value(quad, half_line, 3.0);
    CHECK_REL(p.value, 4.5, 1e-10);
    CHECK_REL(p.argmax, 3.0, 1e-8);
    CHECK(p.attained);
}

TEST_CASE("quartic conjugates to the Holder-paired power") {
    auto p = conjugate_value(quartic, half_line, 2.0);
    CHECK_REL(p.value, std::pow(2.0, 4.0 / 3.0) * 0.75, 1e-10);
    CHECK_REL(p.argmax, std::cbrt(2.0), 1e-8);
}

TEST_CASE("log-pole conjugate hits the stationary-point closed form") {
    auto p = conjugate_value(logpole, pole_dom, 2.0);
    CHECK_REL(p.value, 5.0 - std::log(6.0), 1e-10);
    CHECK_REL(p.argmax, 2.5, 1e-7);
    // below the initial slope the supremum sits at lambda = 0
    auto q = conjugate_value(logpole, pole_dom, 0.2);
    CHECK(q.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sublinear growth toward an infinite edge yields infinity markers") {
    auto f = [](double l) { return std::sqrt(1.0 + l * l) - 1.0; };
    auto s = conjugate(f, half_line, {0.2, 0.5, 0.9, 1.5, 4.0}, "sqrt-shift");
    CHECK_REL(s.values()[1], 1.0 - std::sqrt(0.75), 1e-9);
    CHECK(std::isinf(s.values()[3]));
    CHECK(std::isinf(s.values()[4]));
    CHECK(s.has_infinite_values());
    CHECK_FALSE(std::isinf(s.values()[2]));
    // csv renders the markers as "inf", never a sentinel number
    auto text = s.csv();
    CHECK(text.rfind("x,f_star\n", 0) == 0);
    CHECK(text.find("inf") != std::string::npos);
    CHECK(text.find("1e+300") == std::string::npos);
}

TEST_CASE("conjugate on a grid matches the closed form with a monotone argmax trace") {
    auto grid = linear_points(0.0, 6.0, 601);
    auto s = conjugate(logpole, pole_dom, grid, "logpole*");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double x = grid[i];
        if (x < 1.0 / 3.0 + 0.05) continue; // kink region where the sup sits at 0
        CHECK_REL(s.values()[i], logpole_conj(x), 1e-9);
        CHECK_REL(s.argmax()[i], 3.0 - 1.0 / x, 1e-7);
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(s.values()[i] >= s.values()[i - 1] - 1e-12);
        CHECK(s.argmax()[i] >= s.argmax()[i - 1] - 1e-9);
    }
}

TEST_CASE("fenchel-moreau deviation stays within family budgets") {
    SampledConvexFunction q("quad", quad, ConvexDomain{0.0, 3.0, true},
                            linear_points(0.0, 3.0, 201));
    CHECK(fenchel_moreau_check(q) <= 1e-6);

    SampledConvexFunction p4("quartic", quartic, ConvexDomain{0.0, 2.0, true},
                             linear_points(0.0, 2.0, 201));
    CHECK(fenchel_moreau_check(p4) <= 1e-5);

    SampledConvexFunction lp("logpole", logpole, ConvexDomain{0.0, 2.9, true},
                             linear_points(0.0, 2.9, 201));
    CHECK(fenchel_moreau_check(lp) <= 1e-4);
}

TEST_CASE("conjugate derivative recovers the maximizing lambda") {
    auto sq = conjugate(quad, half_line, linear_points(0.0, 5.0, 501), "quad*");
    auto d = conjugate_derivative(sq, 3.0);
    CHECK_REL(d.value, 3.0, 1e-8);
    CHECK_FALSE(d.one_sided);

    auto s4 = conjugate(quartic, half_line, linear_points(0.0, 3.0, 501), "quartic*");
    CHECK_REL(conjugate_derivative(s4, 1.0).value, 1.0, 1e-4);

    auto slp = conjugate(logpole, pole_dom, linear_points(0.0, 6.0, 601), "logpole*");
    auto dlp = conjugate_derivative(slp, 2.0);
    CHECK_REL(dlp.value, 2.5, 1e-4);
    CHECK_REL(slp.argmax()[200], 2.5, 1e-7); // derivative equals the stored maximizer

    CHECK(conjugate_derivative(sq, 0.0).one_sided);
    CHECK(conjugate_derivative(sq, 5.0).one_sided);
    CHECK(conjugate_derivative(sq, 2.5).one_sided == false);
    CHECK_THROWS_AS(conjugate_derivative(sq, 5.5), input_error);
}

TEST_CASE("derivative is nondecreasing across the grid") {
    auto slp = conjugate(logpole, pole_dom, linear_points(0.0, 6.0, 301), "logpole*");
    double prev = -inf;
    for (double x : linear_points(0.1, 5.9, 59)) {
        double d = conjugate_derivative(slp, x).value;
        CHECK(d >= prev - 1e-9);
        prev = d;
    }
}

TEST_CASE("young inequality holds on random pairs") {
    std::mt19937_64 rng(20240817);
    auto check_family = [&](auto&& f, const ConvexDomain& dom, double lam_hi) {
        std::uniform_real_distribution<double> lam(dom.lo, lam_hi);
        std::uniform_real_distribution<double> arg(0.0, 12.0);
        for (int i = 0; i < 100; ++i) {
            double l = lam(rng), x = arg(rng);
            double fs = conjugate_value(f, dom, x).value;
            CHECK(f(l) + fs - l * x >= -1e-8);
        }
    };
    check_family(quad, half_line, 10.0);
    check_family(quartic, half_line, 10.0);
    check_family(logpole, pole_dom, 2.999);
}

TEST_CASE("non-convex vertex data is rejected") {
    CHECK_THROWS_AS(SampledConvexFunction("bad", {0.0, 1.0, 2.0, 3.0},
                                          {0.0, 1.0, 0.2, 2.0},
                                          ConvexDomain{0.0, 3.0, true}),
                    construction_error);
}

TEST_CASE("grid-backed samples interpolate linearly between vertices") {
    SampledConvexFunction s("pl", {0.0, 1.0, 2.0}, {0.0, 1.0, 3.0},
                            ConvexDomain{0.0, 2.0, true});
    CHECK_REL(s(0.5), 0.5, 1e-12);
    CHECK_REL(s(1.5), 2.0, 1e-12);
    auto sc = conjugate(s, linear_points(0.0, 1.9, 39));
    // segment slopes are 1 then 2, so for x = 1.9 the sup sits at the kink l = 1
    CHECK_REL(sc.values().back(), 1.9 * 1.0 - 1.0, 1e-6);
}
