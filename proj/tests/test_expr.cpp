#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ergo/errors.hpp"
#include "ergo/expr.hpp"
#include "ergo/potential.hpp"
#include "ergo/rng.hpp"

using namespace ergo;

TEST_CASE("basic evaluation and precedence") {
    CHECK(Expr::parse("x1^2/2", 1).eval1(2.0) == doctest::Approx(2.0));
    CHECK(Expr::parse("abs(x1)^0.5", 1).eval1(4.0) == doctest::Approx(2.0));
    CHECK(Expr::parse("2+3*4^2", 1).eval1(0.0) == doctest::Approx(50.0));
    CHECK(Expr::parse("2^3^2", 1).eval1(0.0) == doctest::Approx(512.0));  // right assoc
    CHECK(Expr::parse("-x1^2", 1).eval1(3.0) == doctest::Approx(-9.0));
    CHECK(Expr::parse("(1-x1)/(1+x1)", 1).eval1(0.5) == doctest::Approx(1.0 / 3.0));
    CHECK(Expr::parse("exp(log(x1))", 1).eval1(2.5) == doctest::Approx(2.5));
    CHECK(Expr::parse("sqrt(x1^2+x2^2)", 2).eval({std::vector<double>{3.0, 4.0}}) ==
          doctest::Approx(5.0));
}

TEST_CASE("custom expression matches the builtin Power closed form") {
    // ((0.01 + x1^2 + x2^2)^0.5)^1.5 is Power(p = 1.5, delta = 0.1) in 2D.
    Expr e = Expr::parse("((0.01+x1^2+x2^2)^0.5)^1.5", 2);
    auto p = Potential::power(1.5, 0.1, 2);
    for (int k = 0; k < 100; ++k) {
        double pt[2] = {10.0 * CounterRng::uniform(7, 1, k) - 5.0,
                        10.0 * CounterRng::uniform(7, 2, k) - 5.0};
        double a = e.eval(pt);
        double b = p.value(pt);
        CHECK(std::fabs(a - b) < 1e-12 * std::max(1.0, std::fabs(b)));
    }
}

TEST_CASE("parse errors carry positions and names") {
    CHECK_THROWS_AS(Expr::parse("x1 +* 2", 1), ParseError);
    try {
        Expr::parse("x1 +* 2", 1);
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
    CHECK_THROWS_AS(Expr::parse("(x1+1", 1), ParseError);
    CHECK_THROWS_WITH_AS(Expr::parse("y1+2", 1), doctest::Contains("unknown identifier"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(Expr::parse("foo(x1)", 1), doctest::Contains("unknown identifier"),
                         ConfigError);
    // dimension mismatch
    CHECK_THROWS_WITH_AS(Expr::parse("x3+1", 2), doctest::Contains("out of range"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("", 1), ParseError);
}

TEST_CASE("print round-trips through the parser") {
    const char* samples[] = {
        "x1^2/2",
        "abs(x1)^0.5",
        "1+2*x1-3/x1^2",
        "exp(-(x1^2))+log(1+abs(x1))",
        "sqrt(0.25+x1^2)*x1-7",
        "-(x1-1)*(x1+1)",
    };
    for (const char* s : samples) {
        Expr a = Expr::parse(s, 1);
        Expr b = Expr::parse(a.print(), 1);
        for (int k = 0; k < 100; ++k) {
            double x = 9.0 * CounterRng::uniform(11, 3, k) + 0.5;  // keep away from poles
            double va = a.eval1(x);
            double vb = b.eval1(x);
            CHECK(std::fabs(va - vb) < 1e-12 * std::max(1.0, std::fabs(va)));
        }
    }
}
