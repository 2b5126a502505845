#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ergo/errors.hpp"
#include "ergo/evolve.hpp"
#include "ergo/local_poincare.hpp"
#include "ergo/muckenhoupt.hpp"
#include "ergo/spectral.hpp"

using namespace ergo;

TEST_CASE("discretization structure: conservativity, symmetry, sign pattern") {
    DiscretizedGenerator d(Potential::quadratic(1.0), 8.0, 1601);
    CHECK(d.max_abs_row_sum() < 1e-10);
    CHECK(d.symmetry_defect() < 1e-10);
    std::vector<double> ones(static_cast<std::size_t>(d.size()), 1.0), out;
    d.apply(ones, out);
    double m = 0;
    for (double v : out) m = std::max(m, std::fabs(v));
    CHECK(m < 1e-10);
    for (int i = 0; i + 1 < d.size(); ++i) {
        CHECK(d.offdiag(i) >= 0.0);
        CHECK(d.subdiag(i + 1) >= 0.0);
    }
}

TEST_CASE("Ornstein-Uhlenbeck gap: Hermite eigenvalues give lambda1 = 1") {
    auto rep = spectral_gap(Potential::quadratic(1.0), 8.0, 1601);
    CHECK(std::fabs(rep.lambda1 - 1.0) < 0.005);
    CHECK(std::fabs(rep.c_p - 1.0) < 0.005);
    CHECK(rep.richardson_error < 1e-4);
    CHECK_FALSE(rep.no_gap);
}

TEST_CASE("two-sided exponential measure: refinement study pins the gap at 1/2") {
    // mu ~ e^{-2 (delta^2+x^2)^(1/2)}: the box-truncated gap decreases
    // toward the essential-spectrum bottom 1/2, so C_P -> 2.
    auto r16 = spectral_gap(Potential::power(1.0, 0.01), 16.0, 3201);
    auto r32 = spectral_gap(Potential::power(1.0, 0.01), 32.0, 3201);
    CHECK(r16.lambda1 > r32.lambda1);
    CHECK(r32.lambda1 > 0.5);
    CHECK(std::fabs(r32.c_p - 2.0) < 0.05 * 2.0);
}

TEST_CASE("pure Neumann Laplacian matches the cosine eigenvalue") {
    // 1/2 Delta on [-R, R]: first Neumann eigenfunction cos(pi (x+R)/(2R)),
    // lambda1 = pi^2/(8 R^2), so C_P = 8 R^2 / pi^2.
    double R = 2.0;
    auto rep = spectral_gap(Potential::parse("0*x1", 1), R, 1601);
    double expect = 8.0 * R * R / (M_PI * M_PI);
    CHECK(std::fabs(rep.c_p - expect) < 0.005 * expect);
}

TEST_CASE("a deep double well is flagged as gapless at this box size") {
    // barrier e^{-2 F(0)} = e^{-128}: the tunneling gap is far below the
    // 1e-12 detection threshold
    auto rep = spectral_gap(Potential::parse("(x1^2-16)^2/4", 1), 6.0, 1201);
    CHECK(rep.no_gap);
    CHECK(std::isinf(rep.c_p));
}

TEST_CASE("muckenhoupt bracket on closed-form cases") {
    SUBCASE("two-sided exponential: classical B = 1/4, reported 1/2") {
        GibbsMeasure m(Potential::power(1.0, 0.0), 16.0, 8001);
        auto mk = muckenhoupt(m);
        // closed form: sup_x (1/2) e^{-2x} (e^{2x}-1) = 1/4, doubled for
        // the generator-time normalization of C_P = 1/lambda1.
        CHECK(mk.b == doctest::Approx(0.5).epsilon(0.01));
        auto rep = spectral_gap(Potential::power(1.0, 0.01), 32.0, 3201);
        CHECK(mk.lower <= rep.c_p);
        CHECK(rep.c_p <= mk.upper * 1.001);
    }
    SUBCASE("gaussian bracket contains C_P = 1") {
        GibbsMeasure m(Potential::quadratic(1.0), 8.0, 2001);
        auto mk = muckenhoupt(m);
        CHECK(mk.lower <= 1.0);
        CHECK(1.0 <= mk.upper);
    }
    SUBCASE("heavy tails diverge under box growth") {
        auto div = muckenhoupt_divergence(Potential::heavy_tail(0.5, 1), 50.0, 2001);
        CHECK(div.diverges);
        auto div2 = muckenhoupt_divergence(Potential::heavy_tail(2.0, 1), 50.0, 2001);
        CHECK(div2.diverges);
        auto ok = muckenhoupt_divergence(Potential::quadratic(1.0), 8.0, 2001);
        CHECK_FALSE(ok.diverges);
    }
}

TEST_CASE("local Poincare: Neumann value, limiting case and bound dominance") {
    SUBCASE("Lebesgue on [-1,1]") {
        GibbsMeasure unif(Potential::parse("0*x1", 1), 1.0, 801, /*box_is_domain=*/true);
        auto lp = local_poincare(unif, 1.0);
        double expect = 8.0 / (M_PI * M_PI);
        CHECK(std::fabs(lp.numerical - expect) < 0.02 * expect);
        CHECK(lp.numerical <= lp.bound);
    }
    SUBCASE("U = full box reduces to the global constant") {
        GibbsMeasure m(Potential::quadratic(1.0), 8.0, 1201);
        auto lp = local_poincare(m, 8.0);
        auto rep = spectral_gap(Potential::quadratic(1.0), 8.0, 1201);
        CHECK(std::fabs(lp.numerical - rep.c_p) < 0.02 * rep.c_p);
    }
    SUBCASE("numerical optimum below the perturbation bound") {
        GibbsMeasure m(Potential::quadratic(1.0), 8.0, 1201);
        for (double u : {1.0, 2.0, 3.0}) {
            auto lp = local_poincare(m, u);
            CHECK(lp.numerical <= lp.bound);
        }
    }
    SUBCASE("U beyond the box is rejected") {
        GibbsMeasure m(Potential::quadratic(1.0), 8.0, 801);
        CHECK_THROWS_AS(local_poincare(m, 9.0), ConfigError);
    }
}

TEST_CASE("oracle consistency: variance decay rate equals 2 lambda1 within 3%") {
    struct Case {
        Potential pot;
        double box;
    };
    std::vector<Case> cases;
    cases.push_back({Potential::quadratic(1.0), 8.0});
    cases.push_back({Potential::quadratic(2.0), 8.0});
    cases.push_back({Potential::power(1.3, 0.1), 10.0});
    for (auto& c : cases) {
        auto rep = spectral_gap(c.pot, c.box, 1601);
        DiscretizedGenerator d(c.pot, c.box, 1601);
        std::vector<double> f0(static_cast<std::size_t>(d.size()));
        for (int i = 0; i < d.size(); ++i) f0[static_cast<std::size_t>(i)] = d.node(i);
        EvolveOptions opts;
        opts.density_mode = false;
        opts.dt = 0.002;
        std::vector<double> tg;
        for (int k = 0; k <= 150; ++k) tg.push_back(0.08 * k / rep.lambda1);
        auto tr = semigroup_evolve(d, f0, tg, opts);
        auto fit = fit_exponential(tr.times, tr.variance);
        CHECK(fit.rate == doctest::Approx(2.0 * rep.lambda1).epsilon(0.03));
    }
}
