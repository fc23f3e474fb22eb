#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "advsel/expr.hpp"

using advsel::Expr;
using advsel::parse_expression;

TEST_CASE("parser evaluates basic arithmetic") {
    CHECK(parse_expression("x*(1-x)")(0.5) == Catch::Approx(0.25));
    CHECK(parse_expression("6 - 0.5*x")(1.0) == Catch::Approx(5.5));
    CHECK(parse_expression("6*ind(0,1)")(0.5) == Catch::Approx(6.0));
    CHECK(parse_expression("6*ind(0,1)")(1.5) == Catch::Approx(0.0));
    CHECK(parse_expression("2^3")(0.0) == Catch::Approx(8.0));
    CHECK(parse_expression("pow(x,3)")(2.0) == Catch::Approx(8.0));
    CHECK(parse_expression("-x^2")(3.0) == Catch::Approx(-9.0)); // -(x^2)
    CHECK(parse_expression("exp(0)")(0.0) == Catch::Approx(1.0));
    CHECK(parse_expression("ln(exp(1))")(0.0) == Catch::Approx(1.0));
    CHECK(parse_expression("sqrt(abs(-4))")(0.0) == Catch::Approx(2.0));
    CHECK(parse_expression("sin(0) + cos(0)")(0.0) == Catch::Approx(1.0));
}

TEST_CASE("parser reports syntax errors with byte offsets") {
    try {
        parse_expression("x + * 2");
        FAIL("expected a parse error");
    } catch (const advsel::ExprError& e) {
        CHECK(e.offset == 4);
    }
    try {
        parse_expression("foo(x)");
        FAIL("expected a parse error");
    } catch (const advsel::ExprError& e) {
        CHECK(e.offset == 0);
    }
    CHECK_THROWS_AS(parse_expression("x + (1"), advsel::ExprError);
    CHECK_THROWS_AS(parse_expression("x 1"), advsel::ExprError);
    CHECK_THROWS_AS(parse_expression("ind(1,0)"), advsel::ExprError);
    CHECK_THROWS_AS(parse_expression("ind(x,1)"), advsel::ExprError);
}

TEST_CASE("evaluation faults are reported") {
    CHECK_THROWS_AS(parse_expression("ln(x)")(-1.0), advsel::EvalError);
    CHECK_THROWS_AS(parse_expression("1/x")(0.0), advsel::EvalError);
    CHECK_THROWS_AS(parse_expression("sqrt(x)")(-1.0), advsel::EvalError);
    CHECK(std::isnan(parse_expression("ln(x)").eval_or_nan(-1.0)));
}

TEST_CASE("symbolic derivatives of the worked examples") {
    Expr d1 = parse_expression("x*(1-x)").derivative();
    CHECK(d1(1.0) == Catch::Approx(-1.0));
    CHECK(d1(0.0) == Catch::Approx(1.0));

    Expr d2 = parse_expression("6-4*x").derivative();
    CHECK(d2(0.3) == Catch::Approx(-4.0));

    Expr d3 = parse_expression("exp(x)").derivative();
    CHECK(d3(0.0) == Catch::Approx(1.0));

    Expr d4 = parse_expression("pow(x,3)").derivative();
    CHECK(d4(2.0) == Catch::Approx(12.0));

    Expr d5 = parse_expression("sin(2*x)").derivative();
    CHECK(d5(0.0) == Catch::Approx(2.0));

    // indicator: constant away from its endpoints
    Expr d6 = parse_expression("6*ind(0,1)").derivative();
    CHECK(d6(0.5) == Catch::Approx(0.0));
}

namespace {

// Random polynomial/exponential expression trees for the derivative
// property; depth-bounded so values stay in a sane range.
std::string random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    switch (pick(rng)) {
        case 0: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", coef(rng));
            return buf;
        }
        case 1: return "x";
        case 2: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
        case 3: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1) + ")";
        case 5: return "sin(" + random_expr(rng, depth - 1) + ")";
        case 6: return "cos(" + random_expr(rng, depth - 1) + ")";
        default: return "exp(0.3*" + random_expr(rng, depth - 1) + ")";
    }
}

} // namespace

TEST_CASE("derivatives agree with central finite differences on 1000 random expressions") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> xs(-2.0, 2.0);
    const double h = 1e-5;
    int checked = 0;
    while (checked < 1000) {
        Expr e = parse_expression(random_expr(rng, 3));
        Expr d = e.derivative();
        double x = xs(rng);
        double dv = d.eval_or_nan(x);
        double fp = e.eval_or_nan(x + h), fm = e.eval_or_nan(x - h);
        if (!std::isfinite(dv) || !std::isfinite(fp) || !std::isfinite(fm)) continue;
        if (std::abs(dv) > 1e4) continue; // steep spots make the FD reference itself unreliable
        double fd = (fp - fm) / (2 * h);
        REQUIRE(std::abs(dv - fd) <= 1e-6 * (1 + std::abs(dv)) + 1e-5 * std::abs(dv) * h);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("printing round-trips through the parser") {
    for (const char* src : {"x*(1-x)", "6 - 0.5*x", "exp(0.3*x) + sin(2*x)",
                            "6*ind(0,1)", "pow(x,3)/(1+x^2)"}) {
        Expr e = parse_expression(src);
        Expr back = parse_expression(e.str());
        for (double x : {-1.3, 0.2, 0.5, 0.9, 1.7})
            CHECK(back.eval_or_nan(x) == Catch::Approx(e.eval_or_nan(x)).margin(1e-14));
    }
}
