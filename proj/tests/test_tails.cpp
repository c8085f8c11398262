#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tailnorm/numerics.hpp"
#include "tailnorm/tails.hpp"
#include "test_util.hpp"

using namespace tailnorm;
namespace {
constexpr double e = std::numbers::e;
}

TEST_CASE("power-log tail values and clamp point") {
    auto t = TailFunction::power_log(3.0, 1.0);
    CHECK(t.x0() == doctest::Approx(e));
    CHECK(t(1.0) == 1.0);
    CHECK(t(e) == 1.0);
    CHECK_REL(t(e * e), 2.0 * std::exp(-6.0), 1e-12);
    CHECK(t.moment_critical_p() == 3.0);
    CHECK(t.mgf_critical_lambda() == 0.0);
}

TEST_CASE("power-log clamp moves right when the log factor overshoots") {
    // with gamma = 9, b = 2 the raw formula exceeds 1 well past e
    auto t = TailFunction::power_log(2.0, 9.0);
    CHECK(t.x0() > e);
    double at = t.x0() * (1.0 + 1e-10);
    CHECK(t(at) <= 1.0);
    CHECK(t(at) > 0.999);
}

TEST_CASE("weibull tail") {
    auto t = TailFunction::weibull(1.0, 2.0);
    CHECK(t(0.0) == 1.0);
    CHECK_REL(t(1.0), std::exp(-1.0), 1e-13);
    CHECK_REL(t(3.0), std::exp(-9.0), 1e-13);
    CHECK(t.mgf_critical_lambda() == inf);
    CHECK(TailFunction::weibull(2.5, 1.0).mgf_critical_lambda() == 2.5);
    CHECK(TailFunction::weibull(2.5, 0.5).mgf_critical_lambda() == 0.0);
}

TEST_CASE("pure power tail clamps below 1") {
    auto t = TailFunction::pure_power(2.0);
    CHECK(t(0.5) == 1.0);
    CHECK(t(1.0) == 1.0);
    CHECK_REL(t(2.0), 0.25, 1e-13);
    CHECK(t.moment_critical_p() == 2.0);
}

TEST_CASE("exp-poly default normalization puts the knee at e") {
    auto t = TailFunction::exp_poly(3.0, 1.0);
    CHECK(t.x0() == doctest::Approx(e));
    CHECK(t(e) == 1.0);
    CHECK_REL(t(2.0 * e), 2.0 * std::exp(-3.0 * e), 1e-12);
    bool has_C = false;
    for (auto& [k, v] : t.params())
        if (k == "C") {
            has_C = true;
            CHECK_REL(v, std::exp(3.0 * e - 1.0), 1e-12);
        }
    CHECK(has_C);
    CHECK(t.mgf_critical_lambda() == 3.0);
}

TEST_CASE("log-power tail") {
    auto t = TailFunction::log_power(2.0, 1.0);
    CHECK(t(0.0) == 1.0);
    CHECK_REL(t(e - 1.0), std::exp(-2.0), 1e-12);
    CHECK(t.moment_critical_p() == inf);
    CHECK(t.mgf_critical_lambda() == 0.0);
}

TEST_CASE("gen-weibull-log with a=0 degenerates to the plain q-weibull") {
    auto t = TailFunction::gen_weibull_log(1.0, 2.0, 0.0); // q = 2
    auto g = TailFunction::subgaussian();
    for (double x : {0.3, 1.0, 2.7, 9.0})
        CHECK_REL(t(x), g(x), 1e-13);
}

TEST_CASE("custom tails are shape-checked at construction") {
    CHECK_THROWS_AS(TailFunction::custom("bad", [](double x) { return std::log(x); }, 0.0,
                                         inf, inf),
                    construction_error);
}

TEST_CASE("make_tail validates family and parameters") {
    CHECK_THROWS_AS(make_tail("no-such-family", {}), input_error);
    CHECK_THROWS_AS(make_tail("weibull", {{"c", 1.0}}), input_error);
    CHECK_THROWS_AS(make_tail("power-log", {{"b", 0.5}, {"gamma", 1.0}}), input_error);
    auto t = make_tail("weibull", {{"c", 1.0}, {"m", 2.0}});
    CHECK_REL(t(1.0), std::exp(-1.0), 1e-13);
}

TEST_CASE("explicit x0 adds clamping without changing the formula beyond it") {
    auto t = make_tail("weibull", {{"c", 1.0}, {"m", 2.0}}, 1.0);
    CHECK(t(0.5) == 1.0);
    CHECK(t(1.0) == 1.0);
    CHECK_REL(t(2.0), std::exp(-4.0), 1e-13);
}

TEST_CASE("json round trip preserves the tail") {
    auto t = make_tail("weibull", {{"c", 1.5}, {"m", 2.5}});
    auto back = tail_from_json(t.to_json().dump());
    for (double x : {0.2, 1.0, 3.3, 8.0})
        CHECK_REL(back(x), t(x), 1e-13);
    CHECK_THROWS_AS(tail_from_json("{\"family\": 3}"), input_error);
    CHECK_THROWS_AS(tail_from_json("not json"), input_error);
    CHECK_THROWS_AS(TailFunction::subgaussian().scaled(2.0).to_json(), input_error);
}

TEST_CASE("quantile_below certifies the level") {
    auto g = TailFunction::subgaussian();
    CHECK_REL(g.quantile_below(std::exp(-8.0)), 4.0, 1e-9);
    auto w = TailFunction::weibull(1.0, 1.0);
    double x = w.quantile_below(1e-12);
    CHECK(w(x) <= 1e-12);
    CHECK_REL(x, 12.0 * std::log(10.0), 1e-9);
}

TEST_CASE("scaled tail dilates the argument") {
    auto s = TailFunction::subgaussian().scaled(2.0);
    CHECK_REL(s(4.0), std::exp(-2.0), 1e-13);
    CHECK(s.x0() == 0.0);
    auto w = TailFunction::weibull(1.0, 1.0).scaled(0.5);
    CHECK(w.mgf_critical_lambda() == doctest::Approx(2.0));
}

TEST_CASE("lorentz quasinorm: identical tails give exactly 1") {
    auto t = TailFunction::weibull(1.0, 2.0);
    auto est = lorentz_quasinorm(t, t);
    CHECK(est.value == doctest::Approx(1.0));
    CHECK_FALSE(est.diverged);
}

TEST_CASE("lorentz quasinorm: dominated exponential pair peaks at the origin") {
    auto t = TailFunction::weibull(2.0, 1.0);
    auto s = TailFunction::weibull(1.0, 1.0);
    auto est = lorentz_quasinorm(t, s);
    CHECK_REL(est.value, 1.0, 1e-9);
    CHECK_FALSE(est.diverged);
}

TEST_CASE("lorentz quasinorm flags a slowly growing ratio") {
    // ratio grows like ln ln-factor mismatch: unbounded but very slow
    auto t = TailFunction::power_log(3.0, 2.0);
    auto s = TailFunction::power_log(3.0, 1.0);
    auto est = lorentz_quasinorm(t, s);
    CHECK(est.diverged);
    CHECK(est.value > 5.0);
    CHECK(est.trace.size() == 3);
    CHECK(est.trace[1] > est.trace[0]);
}

TEST_CASE("lorentz quasinorm: bound vanishing under a live tail is certified infinite") {
    auto t = TailFunction::weibull(1.0, 1.0);
    auto s = TailFunction::custom("truncated-exp",
                                  [](double x) { return x <= 5.0 ? -x : -inf; }, 0.0, inf, 1.0);
    auto est = lorentz_quasinorm(t, s);
    CHECK(est.diverged);
    CHECK(est.value == inf);
    REQUIRE(est.witness.has_value());
    CHECK(*est.witness > 5.0);
}

TEST_CASE("lorentz quasinorm is invariant under joint scaling") {
    auto t = TailFunction::weibull(1.0, 2.0);
    auto s = TailFunction::weibull(0.5, 2.0);
    double ref = lorentz_quasinorm(t, s).value;
    for (double c : {0.5, 2.0}) {
        double v = lorentz_quasinorm(t.scaled(c), s.scaled(c)).value;
        CHECK_REL(v, ref, 1e-9);
    }
}
