#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ergo/generator.hpp"
#include "ergo/gibbs.hpp"
#include "ergo/grid.hpp"
#include "ergo/lyapunov.hpp"
#include "ergo/rng.hpp"

using namespace ergo;

TEST_CASE("pointwise application on hand-checked cases") {
    auto L = GeneratorSpec::overdamped(Potential::quadratic(1.0));
    TestFunction f(Polynomial::monomial(1, 0, 2));  // x^2
    double x = 1.0;
    CHECK(apply(L, f, {&x, 1}) == doctest::Approx(-1.0));  // 1/2*2 - 1*2

    auto K = GeneratorSpec::kinetic(Potential::quadratic(1.0));
    TestFunction g(Polynomial::monomial(2, 0, 3));  // g(x) = x^3 on (x, v)
    double p0[2] = {1.0, 0.0};
    CHECK(apply(K, g, p0) == doctest::Approx(0.0));  // v g'(x) at v = 0
    double p1[2] = {1.0, 2.0};
    CHECK(apply(K, g, p1) == doctest::Approx(6.0));  // 2 * 3x^2
}

TEST_CASE("carre du champ formulas and degeneracy") {
    auto L = GeneratorSpec::overdamped(Potential::quadratic(1.0));
    TestFunction f = TestFunction::coordinate(1, 0);
    for (double x : {-3.0, 0.0, 1.7}) CHECK(carre_du_champ(L, f, {&x, 1}) == doctest::Approx(1.0));

    auto K = GeneratorSpec::kinetic(Potential::quadratic(1.0));
    TestFunction g(Polynomial::monomial(2, 0, 2));  // x-only
    for (double x : {-2.0, 0.5}) {
        for (double v : {-1.0, 2.0}) {
            double pt[2] = {x, v};
            CHECK(carre_du_champ(K, g, pt) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("defining identity L(f^2) - 2 f Lf = Gamma(f)") {
    auto L = GeneratorSpec::overdamped(Potential::quadratic(1.0));
    Polynomial f = Polynomial::monomial(1, 0, 2) + Polynomial::monomial(1, 0, 1);  // x^2 + x
    TestFunction tf(f);
    TestFunction tf2(f * f);
    for (int k = 0; k < 100; ++k) {
        double x = 8.0 * CounterRng::uniform(3, 1, k) - 4.0;
        double lhs = apply(L, tf2, {&x, 1}) - 2.0 * tf.value({&x, 1}) * apply(L, tf, {&x, 1});
        double rhs = carre_du_champ(L, tf, {&x, 1});
        CHECK(std::fabs(lhs - rhs) < 1e-8 * std::max(1.0, std::fabs(rhs)));
    }
}

TEST_CASE("derivation property Gamma(fg, h) = f Gamma(g,h) + g Gamma(f,h)") {
    auto L = GeneratorSpec::overdamped(Potential::power(1.3, 0.1));
    Polynomial fs[3] = {Polynomial::monomial(1, 0, 1),
                        Polynomial::monomial(1, 0, 2) + Polynomial::constant(1, 1.0),
                        Polynomial::monomial(1, 0, 3) + Polynomial::monomial(1, 0, 1, -2.0)};
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const Polynomial& f = fs[a];
            const Polynomial& g = fs[b];
            const Polynomial& h = fs[(a + b) % 3];
            TestFunction tf(f), tg(g), th(h), tfg(f * g);
            for (int k = 0; k < 30; ++k) {
                double x = 6.0 * CounterRng::uniform(5, 1, static_cast<std::uint64_t>(9 * k + 3 * a + b)) - 3.0;
                double lhs = carre_du_champ(L, tfg, th, {&x, 1});
                double rhs = tf.value({&x, 1}) * carre_du_champ(L, tg, th, {&x, 1}) +
                             tg.value({&x, 1}) * carre_du_champ(L, tf, th, {&x, 1});
                CHECK(std::fabs(lhs - rhs) < 1e-8 * std::max(1.0, std::fabs(rhs)));
            }
        }
    }
}

TEST_CASE("chain rule against the exp-of-potential closed form") {
    auto F = Potential::power(1.3, 0.1);
    auto L = GeneratorSpec::overdamped(F);
    double a = 0.7;
    TestFunction V(TestFunction::ExpOfPotential{a, F});
    for (int k = 0; k < 100; ++k) {
        double x = 8.0 * CounterRng::uniform(13, 1, k) - 4.0;
        double lhs = apply(L, V, {&x, 1});
        double rhs = a * V.value({&x, 1}) * h_a(F, a, {&x, 1});
        CHECK(std::fabs(lhs - rhs) < 1e-8 * std::max(1.0, std::fabs(rhs)));
    }
}

TEST_CASE("invariance of mu under the overdamped generator") {
    auto F = Potential::quadratic(1.0);
    auto L = GeneratorSpec::overdamped(F);
    GibbsMeasure m(F, 8.0, 2001);
    for (int deg = 1; deg <= 10; ++deg) {
        TestFunction f(Polynomial::monomial(1, 0, deg));
        double acc = 0, norm = 0;
        for (int i = 0; i < m.grid_nodes(); ++i) {
            double x = m.node(i);
            acc += apply(L, f, {&x, 1}) * m.weights()[static_cast<std::size_t>(i)];
            norm = std::max(norm, std::fabs(f.value({&x, 1})));
        }
        CHECK(std::fabs(acc) < 1e-5 * norm);
    }
}

TEST_CASE("invariance of the kinetic measure on the 2D box") {
    auto F = Potential::quadratic(1.0);
    auto K = GeneratorSpec::kinetic(F);
    Grid1D gx{-6.5, 6.5, 261}, gv{-6.5, 6.5, 261};
    auto wx = quadrature_weights(gx);
    auto wv = quadrature_weights(gv);
    // normalized product weights for e^{-(v^2 + 2F)}
    double zx = 0, zv = 0;
    std::vector<double> rx(static_cast<std::size_t>(gx.n)), rv(static_cast<std::size_t>(gv.n));
    for (int i = 0; i < gx.n; ++i) {
        rx[static_cast<std::size_t>(i)] = std::exp(-2.0 * F.value1(gx.node(i)));
        zx += wx[static_cast<std::size_t>(i)] * rx[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < gv.n; ++j) {
        rv[static_cast<std::size_t>(j)] = std::exp(-gv.node(j) * gv.node(j));
        zv += wv[static_cast<std::size_t>(j)] * rv[static_cast<std::size_t>(j)];
    }

    std::vector<TestFunction> fs;
    fs.push_back(TestFunction(Polynomial::monomial(2, 0, 1)));                       // x
    fs.push_back(TestFunction(Polynomial::monomial(2, 1, 1)));                       // v
    fs.push_back(TestFunction(Polynomial::monomial(2, 0, 1) * Polynomial::monomial(2, 1, 1)));
    fs.push_back(TestFunction(Polynomial::monomial(2, 0, 2)));
    fs.push_back(TestFunction(Polynomial::monomial(2, 1, 2)));
    fs.push_back(TestFunction(Polynomial::monomial(2, 0, 2) * Polynomial::monomial(2, 1, 1)));
    fs.push_back(TestFunction(Polynomial::monomial(2, 0, 3)));
    fs.push_back(TestFunction(Polynomial::monomial(2, 1, 3)));
    fs.push_back(TestFunction(Polynomial::monomial(2, 0, 2) * Polynomial::monomial(2, 1, 2)));
    fs.push_back(TestFunction(Polynomial::monomial(2, 0, 4)));

    for (const auto& f : fs) {
        double acc = 0, norm = 0;
        for (int i = 0; i < gx.n; ++i) {
            for (int j = 0; j < gv.n; ++j) {
                double pt[2] = {gx.node(i), gv.node(j)};
                double w = (wx[static_cast<std::size_t>(i)] * rx[static_cast<std::size_t>(i)] / zx) *
                           (wv[static_cast<std::size_t>(j)] * rv[static_cast<std::size_t>(j)] / zv);
                acc += apply(K, f, pt) * w;
                norm = std::max(norm, std::fabs(f.value(pt)));
            }
        }
        CHECK(std::fabs(acc) < 1e-5 * norm);
    }
}

TEST_CASE("Gamma is nonnegative on the grid") {
    auto K = GeneratorSpec::kinetic(Potential::power(1.3, 0.1));
    Polynomial mixed = Polynomial::monomial(2, 0, 2) * Polynomial::monomial(2, 1, 1) +
                       Polynomial::monomial(2, 1, 3, -0.5);
    TestFunction f(mixed);
    for (int i = -10; i <= 10; ++i)
        for (int j = -10; j <= 10; ++j) {
            double pt[2] = {0.6 * i, 0.6 * j};
            CHECK(carre_du_champ(K, f, pt) >= 0.0);
        }
}

TEST_CASE("general diffusion with parsed drift") {
    std::vector<double> sigma{std::sqrt(2.0)};
    std::vector<Expr> drift;
    drift.push_back(Expr::parse("-2*x1", 1));
    auto L = GeneratorSpec::general_diffusion(sigma, std::move(drift));
    TestFunction f(Polynomial::monomial(1, 0, 2));
    double x = 1.5;
    // 1/2 * 2 * 2 + (-2x)(2x) = 2 - 4x^2
    CHECK(apply(L, f, {&x, 1}) == doctest::Approx(2.0 - 4.0 * x * x));
    CHECK(carre_du_champ(L, f, {&x, 1}) == doctest::Approx(2.0 * 4.0 * x * x));
}

TEST_CASE("grid functions use one-sided stencils at edges") {
    Grid1D g{-1.0, 1.0, 201};
    GridFunction gf{g, {}};
    gf.values.resize(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) gf.values[static_cast<std::size_t>(i)] = std::exp(g.node(i));
    TestFunction f(gf);
    for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        CHECK(f.grad({&x, 1})(0) == doctest::Approx(std::exp(x)).epsilon(1e-3));
        CHECK(f.hessian({&x, 1})(0, 0) == doctest::Approx(std::exp(x)).epsilon(1e-2));
    }
}
