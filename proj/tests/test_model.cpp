#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "advsel/config.hpp"
#include "advsel/problem.hpp"
#include "advsel/rootfind.hpp"
#include "advsel/vanishing.hpp"

using namespace advsel;

static RawConfig fig2_red_raw() {
    RawConfig cfg;
    cfg.f = "x*(1-x)";
    cfg.r = "6 - 0.5*x";
    cfg.n0 = "6*ind(0,1)";
    cfg.domain_lo = 0;
    cfg.domain_hi = 1;
    return cfg;
}

TEST_CASE("find_equilibria on the logistic velocity field") {
    Expr f = parse_expression("x*(1-x)");
    auto eq = find_equilibria(f, -0.5, 1.5, 2048, 1e-10, 1e-6);
    REQUIRE(eq.size() == 2);
    CHECK(eq[0].location == Catch::Approx(0.0).margin(1e-9));
    CHECK(eq[0].slope == Catch::Approx(1.0).margin(1e-6));
    CHECK(eq[0].kind == Stability::Unstable);
    CHECK(eq[1].location == Catch::Approx(1.0).margin(1e-9));
    CHECK(eq[1].slope == Catch::Approx(-1.0).margin(1e-6));
    CHECK(eq[1].kind == Stability::Stable);
}

TEST_CASE("find_equilibria basic cases") {
    auto eq1 = find_equilibria(parse_expression("-x"), -1, 1, 2048, 1e-10, 1e-6);
    REQUIRE(eq1.size() == 1);
    CHECK(eq1[0].location == Catch::Approx(0.0).margin(1e-9));
    CHECK(eq1[0].kind == Stability::Stable);

    auto eq2 = find_equilibria(parse_expression("x^2+1"), -1, 1, 2048, 1e-10, 1e-6);
    CHECK(eq2.empty());

    // plateau: f identically zero on a left segment
    auto eq3 = find_equilibria(parse_expression("-x*ind(0,2)"), -1, 2, 2048, 1e-10, 1e-6);
    REQUIRE_FALSE(eq3.empty());
    CHECK(eq3[0].is_plateau());
    CHECK(eq3[0].plateau->first == Catch::Approx(-1.0).margin(1e-2));
    CHECK(eq3[0].plateau->second == Catch::Approx(0.0).margin(1e-2));
}

TEST_CASE("roots come back sorted with alternating signs of f between them") {
    Expr f = parse_expression("sin(3*x)");
    auto eq = find_equilibria(f, -2, 2, 2048, 1e-10, 1e-6);
    REQUIRE(eq.size() >= 3);
    for (std::size_t i = 1; i < eq.size(); ++i) {
        CHECK(eq[i].location > eq[i - 1].location);
        double mid = 0.5 * (eq[i].location + eq[i - 1].location);
        double before = (i >= 2) ? f(0.5 * (eq[i - 1].location + eq[i - 2].location))
                                 : f(eq[0].location - 0.1);
        CHECK(f(mid) * before < 0);
    }
    for (const auto& e : eq) CHECK(std::abs(f(e.location)) <= 1e-9);
}

TEST_CASE("vanishing order: positive value, monomials, exact zero") {
    Expr six = parse_expression("6*ind(0,1)");
    auto v0 = vanishing_order(six, 0.0, Side::Right, 1.0, 0.05);
    CHECK(v0.alpha == Catch::Approx(0.0));
    CHECK(v0.C == Catch::Approx(6.0));

    auto v2 = vanishing_order(parse_expression("x^2"), 0.0, Side::Right, 1.0, 0.05);
    CHECK(v2.alpha == Catch::Approx(2.0).epsilon(0.02));
    CHECK(v2.C == Catch::Approx(1.0).epsilon(0.02));

    auto vz = vanishing_order(parse_expression("ind(0.5,1)"), 0.0, Side::Right, 0.1, 0.05);
    CHECK(vz.source == VanishingSource::ExactlyZeroNearby);
}

TEST_CASE("vanishing order recovers (alpha, C) within 2 percent") {
    for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
        for (double C : {0.1, 1.0, 10.0}) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3f*pow(x,%.3f)", C, alpha);
            auto v = vanishing_order(parse_expression(buf), 0.0, Side::Right, 1.0, 0.05);
            CHECK(v.alpha == Catch::Approx(alpha).epsilon(0.02));
            CHECK(v.C == Catch::Approx(C).epsilon(0.02));
        }
    }
    // left side
    auto v = vanishing_order(parse_expression("pow(0-x,2)"), 0.0, Side::Left, 1.0, 0.05);
    CHECK(v.alpha == Catch::Approx(2.0).epsilon(0.02));
}

TEST_CASE("validate accepts the logistic benchmark setup") {
    auto res = validate(fig2_red_raw());
    REQUIRE(res.ok());
    const auto& spec = *res.spec;
    CHECK(spec.support_lo == Catch::Approx(0.0).margin(1e-6));
    CHECK(spec.support_hi == Catch::Approx(1.0).margin(1e-6));
    REQUIRE(spec.equilibria.size() == 2);
    CHECK(spec.equilibria[0].kind == Stability::Unstable);
    CHECK(spec.equilibria[1].kind == Stability::Stable);
}

TEST_CASE("validate rejects bad data with structured violations") {
    auto bad_r = fig2_red_raw();
    bad_r.r = "-1";
    auto res1 = validate(bad_r);
    REQUIRE_FALSE(res1.ok());
    bool found = false;
    for (const auto& v : res1.violations)
        if (v.kind == ViolationKind::NonNegativityViolation && v.field == "r") found = true;
    CHECK(found);

    auto zero_n0 = fig2_red_raw();
    zero_n0.n0 = "0*x";
    auto res2 = validate(zero_n0);
    REQUIRE_FALSE(res2.ok());
    CHECK(res2.violations[0].kind == ViolationKind::EmptySupport);

    auto wide_n0 = fig2_red_raw();
    wide_n0.n0 = "6*ind(-1,2)";
    auto res3 = validate(wide_n0);
    REQUIRE_FALSE(res3.ok());
    CHECK(res3.violations[0].kind == ViolationKind::SupportExceedsDomain);
}

TEST_CASE("validate warns when the domain is not positively invariant") {
    RawConfig cfg;
    cfg.f = "1 + 0*x";
    cfg.r = "1 + 0*x";
    cfg.n0 = "ind(0.2,0.4)";
    cfg.domain_lo = 0;
    cfg.domain_hi = 1;
    auto res = validate(cfg);
    REQUIRE(res.ok());
    bool warned = false;
    for (const auto& w : res.spec->warnings)
        if (w.kind == ViolationKind::NotPositivelyInvariant) warned = true;
    CHECK(warned);
}

TEST_CASE("validate is idempotent on a valid spec") {
    auto res1 = validate(fig2_red_raw());
    REQUIRE(res1.ok());
    // re-validating the same raw config yields the same resolved data
    auto res2 = validate(fig2_red_raw());
    REQUIRE(res2.ok());
    CHECK(res1.spec->support_lo == res2.spec->support_lo);
    CHECK(res1.spec->support_hi == res2.spec->support_hi);
    CHECK(res1.spec->equilibria.size() == res2.spec->equilibria.size());
}

TEST_CASE("config parsing: structured text form") {
    std::string text = R"cfg(# benchmark
f = "x*(1-x)"
r = "6 - 0.5*x"   # growth
n0 = "6*ind(0,1)"
domain = [0, 1]
alpha_hint = {root = 0.0, side = "right", alpha = 0.0, C = 6.0}

[numerics]
ode_rel_tol = 1e-10
particle_n = 256
)cfg";
    RawConfig cfg = parse_config_text(text);
    CHECK(cfg.f == "x*(1-x)");
    CHECK(cfg.domain_hi == 1.0);
    REQUIRE(cfg.alpha_hint.has_value());
    CHECK(cfg.alpha_hint->C == 6.0);
    CHECK(cfg.numerics.ode_rel_tol == 1e-10);
    CHECK(cfg.numerics.particle_n == 256);
    CHECK(cfg.numerics.ode_abs_tol == 1e-12); // default untouched
}

TEST_CASE("config parsing: JSON mirror") {
    std::string text = R"cfg({
        "f": "x*(1-x)", "r": "6-4*x", "n0": "6*ind(0,1)",
        "domain": [0, 1],
        "numerics": {"t_horizon": 30}
    })cfg";
    RawConfig cfg = parse_config_text(text);
    CHECK(cfg.r == "6-4*x");
    CHECK(cfg.numerics.t_horizon == 30.0);
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_config_text("f = \"x\"\n"), ConfigError); // missing keys
    CHECK_THROWS_AS(parse_config_text("f = \"x\"\nr = \"1\"\nn0 = \"x\"\ndomain = [0]\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("nonsense line\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"f\": \"x\"}"), ConfigError);
}
