#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tailnorm/gls.hpp"
#include "tailnorm/moments.hpp"
#include "tailnorm/numerics.hpp"
#include "tailnorm/tails.hpp"

using namespace tailnorm;

namespace {

TailFunction unit_cliff() {
    return TailFunction::custom_ln(
        "unit-cliff", [](double) { return -inf; }, 1.0, inf, inf);
}

// what r_psi should report when the conjugate argmax has the closed form
// p*(y), clamped into [1, cap]: a fresh max per level over the cumulative
// y-points, final level's value wins
double r_psi_expected(const LeveledGrid& yg, double (*pstar)(double)) {
    double out = 0.0;
    for (std::size_t lvl = 0; lvl < yg.levels(); ++lvl) {
        std::size_t off = yg.level_offsets[lvl];
        double cap = yg.points[off - 1];
        out = 0.0;
        for (std::size_t i = 0; i < off; ++i) {
            double y = yg.points[i];
            double p = std::clamp(pstar(y), 1.0, cap);
            out = std::max(out, std::exp(std::log(p) / y));
        }
    }
    return out;
}

} // namespace

TEST_CASE("psi families: values, normalization, accessors") {
    PsiFunction fl = PsiFunction::flat(2.0);
    CHECK(fl(1.0) == 1.0);
    CHECK(fl(2.0) == 1.0);
    CHECK(fl.b() == 2.0);
    CHECK(fl.closed_end());
    CHECK(fl.normalization() == 1.0);
    CHECK(fl.family() == PsiFamily::flat);

    PsiFunction pw = PsiFunction::power(2.0);
    CHECK(pw(1.0) == doctest::Approx(1.0));
    CHECK(pw(4.0) == doctest::Approx(2.0));
    CHECK(pw(9.0) == doctest::Approx(3.0));
    CHECK(pw.b() == inf);
    CHECK(!pw.closed_end());
    CHECK(pw.raw(4.0) == doctest::Approx(2.0)); // already normalized

    PsiFunction ep = PsiFunction::exp_power(1.0, 1.0);
    CHECK(ep(1.0) == doctest::Approx(1.0));
    CHECK(ep(2.0) == doctest::Approx(std::numbers::e));
    CHECK(ep.normalization() == doctest::Approx(std::numbers::e));
    CHECK(ep.raw(1.0) == doctest::Approx(std::numbers::e));      // e^{C p^beta} at p=1
    CHECK(ep.raw(2.0) == doctest::Approx(std::exp(2.0)));

    PsiFunction gr = PsiFunction::grand(3.0, 1.0);
    CHECK(gr(1.0) == doctest::Approx(1.0));
    CHECK(gr(2.0) == doctest::Approx(std::cbrt(2.0)));
    CHECK(gr.raw(2.0) == doctest::Approx(1.0)); // (3-2)^{-1/3}
    CHECK(gr.normalization() == doctest::Approx(std::pow(2.0, -1.0 / 3.0)));
    CHECK(gr.b() == 3.0);
    CHECK(!gr.closed_end());
}

TEST_CASE("psi families: >= 1 and continuous on their natural grids") {
    // continuity proxy: doubling the grid density halves the largest
    // adjacent log-step, which a genuine jump would keep pinned
    auto max_log_gap = [](const PsiFunction& psi, std::size_t mult) {
        LeveledGrid grid;
        if (!std::isfinite(psi.b())) {
            CapGridOptions o;
            o.points_per_level *= mult;
            grid = make_cap_grid(1.0, o);
        } else if (psi.closed_end()) {
            grid = make_closed_grid(1.0, psi.b(), 120 * mult);
        } else {
            PoleGridOptions o;
            o.points_per_level *= mult;
            grid = make_pole_grid(1.0, psi.b(), o);
        }
        double worst = 0.0, prev = inf;
        for (double p : grid.points) {
            double v = psi.log_eval(p);
            CHECK(v >= -1e-12); // psi >= 1 after normalization
            if (prev != inf) worst = std::max(worst, std::abs(v - prev));
            prev = v;
        }
        return worst;
    };
    std::vector<PsiFunction> fams = {
        PsiFunction::flat(4.0), PsiFunction::power(1.5),
        PsiFunction::exp_power(0.7, 1.3), PsiFunction::grand(5.0, 2.0)};
    for (const PsiFunction& psi : fams) {
        CAPTURE(psi.name());
        CHECK(max_log_gap(psi, 2) <= 0.6 * max_log_gap(psi, 1) + 1e-9);
        CHECK(psi.h(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("psi families: domain and parameter errors") {
    CHECK_THROWS_AS(PsiFunction::flat(1.0), input_error);
    CHECK_THROWS_AS(PsiFunction::flat(inf), input_error);
    CHECK_THROWS_AS(PsiFunction::power(0.0), input_error);
    CHECK_THROWS_AS(PsiFunction::power(-2.0), input_error);
    CHECK_THROWS_AS(PsiFunction::exp_power(-1.0, 1.0), input_error);
    CHECK_THROWS_AS(PsiFunction::exp_power(1.0, 0.0), input_error);
    CHECK_THROWS_AS(PsiFunction::grand(1.0, 1.0), input_error);
    CHECK_THROWS_AS(PsiFunction::grand(3.0, -1.0), input_error);

    PsiFunction gr = PsiFunction::grand(3.0, 1.0);
    CHECK_THROWS_AS(gr(0.5), input_error);
    CHECK_THROWS_AS(gr(3.0), input_error);   // open end
    CHECK_THROWS_AS(gr(4.0), input_error);
    PsiFunction fl = PsiFunction::flat(2.0);
    CHECK_NOTHROW(fl(2.0));                  // closed end
    CHECK_THROWS_AS(fl(2.0 + 1e-9), input_error);
    CHECK_THROWS_AS(make_psi("mystery", {}), input_error);
    CHECK_THROWS_AS(make_psi("power", {{"q", 2.0}}), input_error);
}

TEST_CASE("default psi grids match the support shape") {
    LeveledGrid g1 = default_psi_grid(PsiFunction::grand(3.0, 1.0));
    CHECK(g1.levels() == 3);
    CHECK(g1.points.front() == 1.0);
    CHECK(g1.points.back() < 3.0);
    CHECK(g1.points.back() > 2.99);

    LeveledGrid g2 = default_psi_grid(PsiFunction::flat(2.0));
    CHECK(g2.points.front() == 1.0);
    CHECK(g2.points.back() == 2.0);

    LeveledGrid g3 = default_psi_grid(PsiFunction::power(2.0));
    CHECK(g3.levels() == 3);
    CHECK(g3.points.back() == 1000.0);
}

TEST_CASE("gls_norm: constant-1 variable scores 1 against every family") {
    TailFunction cliff = unit_cliff();
    std::vector<PsiFunction> fams = {
        PsiFunction::flat(2.0), PsiFunction::power(2.0),
        PsiFunction::exp_power(1.0, 1.0), PsiFunction::grand(3.0, 1.0)};
    for (const PsiFunction& psi : fams) {
        CAPTURE(psi.name());
        MomentCurve curve = natural_psi(cliff, default_psi_grid(psi));
        NormEstimate est = gls_norm(curve, psi);
        CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(!est.diverged);
        CHECK(est.method == "gls-grid-sup");
    }
}

TEST_CASE("gls_norm: flat psi reduces to the single Lebesgue norm") {
    TailFunction expo = TailFunction::weibull(1.0, 1.0);
    PsiFunction fl = PsiFunction::flat(2.0);
    MomentCurve curve = natural_psi(expo, default_psi_grid(fl));
    NormEstimate est = gls_norm(curve, fl);
    // Gamma(p+1)^{1/p} increases, so the sup sits at the closed end p = 2
    CHECK(est.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(!est.diverged);
}

TEST_CASE("gls_norm: homogeneous in the curve scale") {
    TailFunction expo = TailFunction::weibull(1.0, 1.0);
    PsiFunction pw = PsiFunction::power(1.0);
    MomentCurve curve = natural_psi(expo, default_psi_grid(pw));
    NormEstimate base = gls_norm(curve, pw);
    MomentCurve scaled = curve;
    for (double& v : scaled.value) v *= 3.7;
    NormEstimate big = gls_norm(scaled, pw);
    CHECK(big.value == doctest::Approx(3.7 * base.value).epsilon(1e-12));
    CHECK(big.diverged == base.diverged);
    REQUIRE(big.trace.size() == base.trace.size());
    for (std::size_t i = 0; i < base.trace.size(); ++i)
        CHECK(big.trace[i] == doctest::Approx(3.7 * base.trace[i]).epsilon(1e-12));
}

TEST_CASE("gls_norm: pole tail against the matching grand weight diverges") {
    TailFunction tail = TailFunction::power_log(3.0, 1.0);
    MomentCurve curve = natural_psi(tail, make_pole_grid(1.0, 3.0));

    NormEstimate bad = gls_norm(curve, PsiFunction::grand(3.0, 1.0));
    CHECK(bad.diverged);
    REQUIRE(bad.trace.size() == 3);
    // the ratio behaves like (b-p)^{-1/3}: halving the gap grows it by 2^{1/3}
    CHECK(bad.trace[1] / bad.trace[0] == doctest::Approx(std::cbrt(2.0)).epsilon(0.02));
    CHECK(bad.trace[2] / bad.trace[1] == doctest::Approx(std::cbrt(2.0)).epsilon(0.02));
    REQUIRE(bad.witness.has_value());
    CHECK(*bad.witness > 2.99);

    NormEstimate good = gls_norm(curve, PsiFunction::grand(3.0, 2.0));
    CHECK(!good.diverged);
    // with the stronger weight the sup retreats to p = 1, where psi = 1
    double m1 = std::numbers::e + 3.0 * std::exp(-2.0) / 4.0;
    CHECK(good.value == doctest::Approx(m1).epsilon(1e-8));
    CHECK(good.trace.back() == doctest::Approx(good.trace.front()).epsilon(1e-8));
}

TEST_CASE("gls_norm: grid outside the support is refused") {
    TailFunction expo = TailFunction::weibull(1.0, 1.0);
    MomentCurve wide = natural_psi(expo, make_closed_grid(1.0, 4.0, 40));
    CHECK_THROWS_AS(gls_norm(wide, PsiFunction::grand(3.0, 1.0)), input_error);
    CHECK_THROWS_AS(gls_norm(wide, PsiFunction::flat(2.0)), input_error);
    CHECK_NOTHROW(gls_norm(wide, PsiFunction::power(2.0)));
    MomentCurve empty;
    CHECK_THROWS_AS(gls_norm(empty, PsiFunction::power(2.0)), input_error);
    MomentCurve one = natural_psi(expo, std::vector<double>{2.0});
    GlsOptions bad;
    bad.growth_threshold = 1.0;
    CHECK_THROWS_AS(gls_norm(one, PsiFunction::power(2.0), bad), input_error);
}

TEST_CASE("gls_tail_bound: flat weight gives the pure power bound") {
    PsiFunction fl = PsiFunction::flat(2.0);
    TailFunction s1 = gls_tail_bound(fl, 1.0);
    CHECK(s1.x0() == 1.0);
    CHECK(s1(0.5) == 1.0);
    CHECK(s1(1.0) == 1.0);
    CHECK(s1(4.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(s1.log_eval(10.0) == doctest::Approx(-2.0 * std::log(10.0)).epsilon(1e-12));

    TailFunction s2 = gls_tail_bound(fl, 2.0);
    CHECK(s2.x0() == 2.0);
    CHECK(s2(1.5) == 1.0);
    CHECK(s2(4.0) == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(gls_tail_bound(fl, 0.0), input_error);
    CHECK_THROWS_AS(gls_tail_bound(fl, -1.0), input_error);
    CHECK_THROWS_AS(gls_tail_bound(fl, inf), input_error);
    CHECK_THROWS_AS(gls_tail_bound(fl, 1.0, make_closed_grid(1.0, 3.0, 20)), input_error);
}

TEST_CASE("gls_tail_bound: power weight gives a square-exponential regime") {
    TailFunction s = gls_tail_bound(PsiFunction::power(2.0), 1.0);
    // h(p) = (p/2) ln p conjugates to e^{2y-1}/2, so ln(-ln S) is linear in
    // ln x with slope 2 while the maximizer stays under the grid cap
    std::vector<double> ys, vs;
    for (double y : linear_points(1.0, 3.5, 30)) {
        ys.push_back(y);
        vs.push_back(std::log(-s.log_eval_ln(y)));
    }
    SlopeFit fit = fit_line(ys, vs);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.025));
    CHECK(fit.intercept == doctest::Approx(-1.0 - std::log(2.0)).epsilon(0.05));
}

TEST_CASE("gls_tail_bound: grand weight tracks the pole power") {
    TailFunction s = gls_tail_bound(PsiFunction::grand(3.0, 1.0), 1.0);
    // mid range: the envelope's local exponent is the conjugate maximizer,
    // a bit below b because the weight still softens the decay here
    std::vector<double> ys, vs;
    for (double y : linear_points(10.0, 25.0, 30)) {
        ys.push_back(y);
        vs.push_back(s.log_eval_ln(y));
    }
    SlopeFit mid = fit_line(ys, vs);
    CHECK(mid.slope == doctest::Approx(-3.0).epsilon(0.04));

    // far range: the largest grid exponent owns the envelope, exactly
    LeveledGrid grid = default_psi_grid(PsiFunction::grand(3.0, 1.0));
    double p_max = grid.points.back();
    ys.clear();
    vs.clear();
    for (double y : linear_points(300.0, 600.0, 30)) {
        ys.push_back(y);
        vs.push_back(s.log_eval_ln(y));
    }
    SlopeFit far = fit_line(ys, vs);
    CHECK(far.slope == doctest::Approx(-p_max).epsilon(1e-9));
    CHECK(s.moment_critical_p() == doctest::Approx(p_max));
    CHECK(s.mgf_critical_lambda() == 0.0);
}

TEST_CASE("norm then tail bound dominates the tail it came from") {
    struct Pair {
        TailFunction tail;
        PsiFunction psi;
    };
    std::vector<Pair> pairs;
    pairs.push_back({TailFunction::subgaussian(), PsiFunction::power(2.0)});
    pairs.push_back({TailFunction::power_log(3.0, 1.0), PsiFunction::grand(3.0, 2.0)});
    pairs.push_back({TailFunction::weibull(1.0, 1.0), PsiFunction::flat(2.0)});
    for (const Pair& pr : pairs) {
        CAPTURE(pr.tail.name());
        LeveledGrid grid = default_psi_grid(pr.psi);
        NormEstimate v = gls_norm(natural_psi(pr.tail, grid), pr.psi);
        REQUIRE(v.finite());
        TailFunction s = gls_tail_bound(pr.psi, v.value, grid);
        NormEstimate lz = lorentz_quasinorm(pr.tail, s);
        CHECK(!lz.diverged);
        CHECK(lz.value <= 1.0 + 1e-6);
        CHECK(lz.value >= 1.0); // the ratio at 0 is already 1
    }
}

TEST_CASE("r_psi: power weight stabilizes under the cap") {
    NormEstimate est = r_psi(PsiFunction::power(2.0));
    CHECK(est.method == "r-psi-grid-sup");
    REQUIRE(est.trace.size() == 3);
    CHECK(!est.diverged);
    // conjugate argmax for h(p) = (p/2) ln p is e^{2y-1}; the estimate reads
    // the grid sup of its y-th root and converges to e^2 from below
    double expect = r_psi_expected(make_cap_grid(1.0),
                                   [](double y) { return std::exp(2.0 * y - 1.0); });
    CHECK(est.value == doctest::Approx(expect).epsilon(1e-6));
    CHECK(est.value < std::exp(2.0));
    CHECK(est.value > 5.0);
}

TEST_CASE("r_psi: exp-power weight peaks at a small y") {
    NormEstimate est = r_psi(PsiFunction::exp_power(1.0, 1.0));
    CHECK(!est.diverged);
    // h(p) = p^2 - p conjugates with argmax (y+1)/2
    double expect = r_psi_expected(make_cap_grid(1.0),
                                   [](double y) { return (y + 1.0) / 2.0; });
    CHECK(est.value == doctest::Approx(expect).epsilon(1e-6));
    CHECK(est.value == doctest::Approx(1.2606).epsilon(1e-3));
}

TEST_CASE("r_psi: bounded supports are not applicable") {
    CHECK_THROWS_AS(r_psi(PsiFunction::flat(2.0)), not_applicable_error);
    CHECK_THROWS_AS(r_psi(PsiFunction::grand(3.0, 1.0)), not_applicable_error);
    RPsiOptions bad;
    bad.growth_threshold = 0.9;
    CHECK_THROWS_AS(r_psi(PsiFunction::power(2.0), bad), input_error);
}

TEST_CASE("gls_converse_bound: direct norm sits under the Lorentz side") {
    SUBCASE("gaussian-type tail vs power weight") {
        ConverseBoundReport rep =
            gls_converse_bound(TailFunction::weibull(0.5, 2.0), PsiFunction::power(2.0));
        CHECK(rep.holds);
        CHECK(rep.ratio <= 1.0);
        CHECK(rep.direct.value == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-3));
        CHECK(rep.lorentz.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.bound ==
              doctest::Approx(2.0 * rep.r.value * std::exp(1.0 / std::numbers::e) *
                              rep.lorentz.value));
    }
    SUBCASE("constant-1 variable vs power weight") {
        ConverseBoundReport rep = gls_converse_bound(unit_cliff(), PsiFunction::power(2.0));
        CHECK(rep.holds);
        CHECK(rep.direct.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.ratio < 0.1);
    }
    SUBCASE("log-power tail vs exp-power weight") {
        ConverseBoundReport rep =
            gls_converse_bound(TailFunction::log_power(1.0, 1.0), PsiFunction::exp_power(0.5, 1.0));
        CHECK(rep.holds);
        CHECK(rep.ratio <= 1.0);
        CHECK(rep.r.value == doctest::Approx(1.589).epsilon(0.01));
    }
    SUBCASE("bounded support weight is not applicable") {
        CHECK_THROWS_AS(gls_converse_bound(unit_cliff(), PsiFunction::grand(3.0, 1.0)),
                        not_applicable_error);
    }
}

TEST_CASE("psi JSON round trip") {
    for (const PsiFunction& psi :
         {PsiFunction::flat(2.5), PsiFunction::power(1.5), PsiFunction::exp_power(0.7, 1.3),
          PsiFunction::grand(4.0, 2.0)}) {
        CAPTURE(psi.name());
        PsiFunction back = psi_from_json(psi.to_json().dump());
        CHECK(back.family() == psi.family());
        CHECK(back.b() == psi.b());
        double p = std::isfinite(psi.b()) ? 0.5 * (1.0 + psi.b()) : 7.0;
        CHECK(back(p) == doctest::Approx(psi(p)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(psi_from_json("not json"), input_error);
    CHECK_THROWS_AS(psi_from_json(R"({"params": {"m": 2}})"), input_error);
    CHECK_THROWS_AS(psi_from_json(R"({"family": "power", "params": {"m": "two"}})"), input_error);
    CHECK_THROWS_AS(psi_from_json(R"({"family": "power", "params": 3})"), input_error);
}
