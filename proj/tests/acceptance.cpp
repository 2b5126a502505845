// Acceptance suite: runs every acceptance criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ergo/catalog.hpp"
#include "ergo/config.hpp"
#include "ergo/errors.hpp"
#include "ergo/evolve.hpp"
#include "ergo/kinetic.hpp"
#include "ergo/local_poincare.hpp"
#include "ergo/montecarlo.hpp"
#include "ergo/muckenhoupt.hpp"
#include "ergo/rates.hpp"
#include "ergo/spectral.hpp"

namespace fs = std::filesystem;
using namespace ergo;

namespace {

struct Check {
    std::string label;
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::vector<Check> checks;
    double elapsed = 0;
    bool threw = false;
    std::string error;

    bool pass() const {
        if (threw) return false;
        for (const auto& c : checks)
            if (!c.pass) return false;
        return elapsed < budget_seconds;
    }
};

void add(Criterion& c, const std::string& label, bool pass, const std::string& detail = "") {
    c.checks.push_back({label, pass, detail});
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------

Criterion criterion1() {
    Criterion c{1, "OU cross-oracle", 30.0, {}, 0, false, ""};
    auto F = Potential::quadratic(1.0);
    auto rep = spectral_gap(F, 8.0, 1601);
    add(c, "spectral gap = 1 +- 0.5%", std::fabs(rep.lambda1 - 1.0) <= 0.005,
        "lambda1 = " + fmt(rep.lambda1));
    GibbsMeasure m(F, 8.0, 1601);
    auto mk = muckenhoupt(m);
    add(c, "muckenhoupt bracket contains C_P = 1", mk.lower <= 1.0 && 1.0 <= mk.upper,
        "[" + fmt(mk.lower) + ", " + fmt(mk.upper) + "]");
    std::vector<double> lags;
    for (int k = 0; k <= 40; ++k) lags.push_back(0.05 * k);
    auto L = GeneratorSpec::overdamped(F);
    auto tr = mc::autocovariance_trace(L, Expr::parse("x1", 1), m, 2000.0, 1e-3, lags, 12345);
    auto fit = mc::fit_rate(tr, mc::RateFit::Model::Geometric);
    add(c, "autocovariance rate = 1 +- 10%", std::fabs(fit.rho - 1.0) <= 0.10,
        "rate = " + fmt(fit.rho));
    return c;
}

Criterion criterion2() {
    Criterion c{2, "drift-certificate suite", 5.0, {}, 0, false, ""};
    auto F = Potential::quadratic(1.0);
    auto L = GeneratorSpec::overdamped(F);
    auto V = LyapunovCandidate::custom(Expr::parse("1+x1^2", 1));
    VerifyGrid grid{Grid1D{-8, 8, 1601}, std::nullopt};
    auto hand = verify_drift(L, V, PhiSpec::linear(1.0), 2.0, DriftSet::ball(std::sqrt(2.0)),
                             grid);
    add(c, "hand certificate VALID", hand.valid, "worst margin " + fmt(hand.worst_margin));
    auto bad = verify_drift(L, V, PhiSpec::linear(1.0), 1.0, DriftSet::ball(std::sqrt(2.0)),
                            grid);
    add(c, "b = 1 variant INVALID", !bad.valid, "worst margin " + fmt(bad.worst_margin));

    // integrated drift for every VALID linear certificate in the catalog
    GibbsMeasure m(F, 8.0, 2001);
    auto integrated_1d = [&](const LyapunovCandidate& cand, double alpha, double b,
                             const DriftSet& C) {
        double lhs = 0, rhs = 0;
        for (int i = 0; i < m.grid_nodes(); ++i) {
            double x = m.node(i);
            double Vx = cand.value(L, {&x, 1});
            double w = m.weights()[static_cast<std::size_t>(i)];
            lhs += alpha * Vx * w;
            bool inside = C.kind == DriftSet::Kind::Sublevel ? Vx <= C.threshold
                                                             : std::fabs(x) <= C.threshold;
            if (inside) rhs += b * w;
        }
        return std::pair<double, double>(lhs, rhs);
    };
    auto [l1, r1] = integrated_1d(V, 1.0, 2.0, DriftSet::ball(std::sqrt(2.0)));
    add(c, "integrated drift (hand)", l1 <= r1 + 1e-4, fmt(l1) + " <= " + fmt(r1));
    auto fitres = fit_drift_params(L, V, PhiFamily::Linear, grid);
    auto [l2, r2] = integrated_1d(V, fitres.level, fitres.certificate.b,
                                  fitres.certificate.set);
    add(c, "integrated drift (fitted)", fitres.certificate.valid && l2 <= r2 + 1e-4,
        fmt(l2) + " <= " + fmt(r2));

    // kinetic linear certificate from the catalog search
    auto G = Potential::power(1.0, 20.0);
    VerifyGrid kgrid{Grid1D{-6, 6, 121}, Grid1D{-6, 6, 121}};
    auto res = kinetic_search_and_verify(F, G, 1.0, 1.0, kgrid);
    auto K = GeneratorSpec::kinetic(F);
    auto cand = LyapunovCandidate::kinetic_exp(res.feasibility.a, res.feasibility.b, G,
                                               res.shift);
    // quadrature over the product measure on the verification box
    KineticGrid kg{Grid1D{-6, 6, 121}, Grid1D{-6, 6, 121}};
    KineticDiscretization kd(F, kg, true);
    double lhs = 0, rhs = 0;
    for (int i = 0; i < kg.x.n; ++i)
        for (int j = 0; j < kg.v.n; ++j) {
            double pt[2] = {kg.x.node(i), kg.v.node(j)};
            double Vx = cand.value(K, pt);
            double w = kd.weights()[static_cast<std::size_t>(kg.index(i, j))];
            lhs += res.fit.level * Vx * w;
            if (Vx <= res.fit.certificate.set.threshold) rhs += res.fit.certificate.b * w;
        }
    add(c, "integrated drift (kinetic)", res.fit.certificate.valid && lhs <= rhs + 1e-4,
        fmt(lhs) + " <= " + fmt(rhs));
    return c;
}

Criterion criterion3() {
    Criterion c{3, "Lyapunov-Poincare constant pipeline", 60.0, {}, 0, false, ""};
    auto F = Potential::quadratic(1.0);
    GibbsMeasure m(F, 8.0, 1601);
    auto lp = local_poincare(m, 3.0);
    // hand drift LV <= -2 alpha V + b 1_C with alpha = 0.5, b = 2;
    // kappa_U converted to the carre-du-champ normalization
    auto res = clp(0.5, 2.0, lp.numerical / 2.0, m.mass(-3.0, 3.0), 2);
    add(c, "C_LP finite", std::isfinite(res.c_lp), "C_LP = " + fmt(res.c_lp));

    DiscretizedGenerator d(F, 8.0, 1601);
    int n = d.size();
    std::vector<double> f0(static_cast<std::size_t>(n)), W(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        f0[static_cast<std::size_t>(i)] = d.node(i);
        W[static_cast<std::size_t>(i)] = 1.0 + d.node(i) * d.node(i) + res.lambda;
    }
    EvolveOptions opts;
    opts.density_mode = false;
    opts.weight = W;
    opts.dt = 0.002;
    std::vector<double> tg;
    for (int k = 0; k <= 120; ++k) tg.push_back(0.1 * k);
    auto tr = semigroup_evolve(d, f0, tg, opts);
    auto fit = fit_exponential(tr.times, tr.weighted_variance);
    add(c, "weighted-variance rate >= 1/C_LP - 5%", fit.rate >= 1.0 / res.c_lp - 0.05,
        "rate " + fmt(fit.rate) + " vs 1/C_LP " + fmt(1.0 / res.c_lp));
    return c;
}

Criterion criterion4() {
    Criterion c{4, "sub-exponential exponents", 60.0, {}, 0, false, ""};
    auto F = Potential::power(0.5, 0.01);
    auto L = GeneratorSpec::overdamped(F);
    auto V = LyapunovCandidate::exp_radial(0.5, 0.5, 1.0);
    VerifyGrid grid{Grid1D{-400, 400, 8001}, std::nullopt};
    auto fit = fit_drift_params(L, V, PhiFamily::LogPower, grid, 2.0);
    PhiSpec phi = PhiSpec::log_power(fit.level, 2.0);
    GibbsMeasure m(F, 1600.0, 64001);
    BetaWDef bw(m, L, V, phi);
    double c_p = integrate(m.grid(), [&](double x) { return std::exp(-0.5 * F.value1(x)); });

    // slope of log beta_W against log log(c_p/s): the closed form's own
    // argument, so the asymptotic exponent (2/p) - 2 = 2 is read off.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = 0; k <= 20; ++k) {
        double s = std::pow(10.0, -8.0 + 5.0 * k / 20.0);
        double X = std::log(std::log(c_p / s));
        double Y = std::log(bw.beta_w(s));
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        ++cnt;
    }
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    add(c, "beta_W log-log-log slope = 2 +- 0.15", std::fabs(slope - 2.0) <= 0.15,
        "slope = " + fmt(slope));

    GibbsMeasure msmall(F, 60.0, 2401);
    auto lp = local_poincare(msmall, 30.0);
    auto cwres = cw(phi, fit.certificate.b, lp.numerical / 2.0, msmall.mass(-30.0, 30.0), 1);
    double rmin = std::max(1e-12, 20.0 * bw.tail_floor());
    XiProfile xi([&](double r) { return bw.beta_w(r); }, cwres.c_w, XiConvention::T, rmin);
    McTrace xtr;
    xtr.kind = "xi";
    for (int k = 0; k <= 80; ++k) {
        double t = std::pow(10.0, 7.0 * k / 80.0);
        double v;
        try {
            v = xi.xi(t);
        } catch (const NumericalError&) {
            break;
        }
        if (v <= 2e-2 && v >= 2e-14) {
            xtr.times.push_back(t);
            xtr.values.push_back(v);
            xtr.stderrs.push_back(0.0);
        }
    }
    auto xfit = mc::fit_rate(xtr, mc::RateFit::Model::Subgeometric);
    add(c, "xi stretch exponent = 1/3 +- 0.05", std::fabs(xfit.delta - 1.0 / 3.0) <= 0.05,
        "delta = " + fmt(xfit.delta));
    return c;
}

Criterion criterion5() {
    Criterion c{5, "heavy-tail exponents", 60.0, {}, 0, false, ""};
    auto F = Potential::heavy_tail(2.0, 1);
    auto div = muckenhoupt_divergence(F, 50.0, 4001);
    add(c, "muckenhoupt divergence flag (no Poincare)", div.diverges,
        "B grows " + fmt(div.b_values.back() / div.b_values.front()) + "x over 3 doublings");

    auto L = GeneratorSpec::overdamped(F);
    double gamma = 0.15 * 1.5;
    auto V = LyapunovCandidate::power_radial(gamma);
    double kphi = 1.0 - 2.0 / gamma;
    Expr phi0 = Expr::parse("x1^(" + format_sig17(kphi) + ")", 1);
    VerifyGrid grid{Grid1D{-10000, 10000, 20001}, std::nullopt};
    auto fit = fit_drift_params(L, V, PhiFamily::General, grid, 1.0, &phi0);
    PhiSpec phi = PhiSpec::general(phi0).scaled(fit.level);
    GibbsMeasure m(F, 10000.0, 400001);
    BetaWDef bw(m, L, V, phi);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = 0; k <= 16; ++k) {
        double s = std::pow(10.0, -6.0 + 4.0 * k / 16.0);
        double X = std::log(1.0 / s);
        double Y = std::log(bw.beta_w(s));
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        ++cnt;
    }
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    add(c, "beta_W polynomial slope in [1.0, 1.2]", slope >= 1.0 && slope <= 1.2,
        "slope = " + fmt(slope));
    return c;
}

Criterion criterion6() {
    Criterion c{6, "kinetic feasibility and decay", 300.0, {}, 0, false, ""};
    auto F = Potential::quadratic(1.0);
    auto feas = kinetic_param_search(1.0, 1.0, 1);
    add(c, "feasible region nonempty", feas.feasible,
        "chosen (a, b) = (" + fmt(feas.a) + ", " + fmt(feas.b) + ")");
    add(c, "region contains (0.02, 0.1)", feas.satisfies(0.02, 0.1));

    auto G = Potential::power(1.0, 20.0);
    VerifyGrid grid{Grid1D{-6, 6, 121}, Grid1D{-6, 6, 121}};
    auto res = kinetic_search_and_verify(F, G, 1.0, 1.0, grid);
    add(c, "drift certificate on |x|,|v| <= 6 VALID", res.fit.certificate.valid,
        "alpha = " + fmt(res.fit.level) + ", b = " + fmt(res.fit.certificate.b));

    KineticGrid kg{Grid1D{-6, 6, 161}, Grid1D{-6, 6, 161}};
    KineticDiscretization kd(F, kg, true);
    int nx = kg.x.n, nv = kg.v.n;
    std::vector<double> h0(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nv));
    double mass = 0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nv; ++j) {
            double x = kg.x.node(i), v = kg.v.node(j);
            double rho = std::exp(-((x - 1.0) * (x - 1.0) + v * v) / (2.0 * 0.5));
            std::size_t id = static_cast<std::size_t>(kg.index(i, j));
            h0[id] = rho / std::exp(-(v * v + 2.0 * F.value1(x)));
            mass += h0[id] * kd.weights()[id];
        }
    for (auto& h : h0) h /= mass;
    std::vector<double> tg;
    for (int k = 0; k <= 80; ++k) tg.push_back(0.125 * k);
    auto tr = kinetic_evolve(kd, h0, tg, 0.01);
    double e0 = tr.entropy.front(), efloor = tr.entropy.back();
    auto efit = fit_exponential(tr.times, tr.entropy, nullptr, 0.6, 6.0 * efloor / e0);
    add(c, "entropy decay rate > 0", efit.rate > 0.0, "rate = " + fmt(efit.rate));
    add(c, "entropy fit R^2 > 0.95", efit.r2 > 0.95, "R^2 = " + fmt(efit.r2));
    return c;
}

Criterion criterion7() {
    Criterion c{7, "Psi-function suite", 120.0, {}, 0, false, ""};
    add(c, "Psi(1) = 0", std::fabs(psi_sobolev(1.0)) < 1e-15);
    add(c, "Psi(2) = 1", std::fabs(psi_sobolev(2.0) - 1.0) < 1e-15);
    add(c, "Psi(4) = 16 log 2 - 5 +- 1e-10",
        std::fabs(psi_sobolev(4.0) - (16.0 * std::log(2.0) - 5.0)) < 1e-10,
        fmt(psi_sobolev(4.0)));

    // C1 continuity at 2: one-sided difference quotients of the
    // implemented piecewise formula.
    double h = 1e-7;
    double left = (psi_sobolev(2.0) - psi_sobolev(2.0 - h)) / h;
    double right = (psi_sobolev(2.0 + h) - psi_sobolev(2.0)) / h;
    add(c, "C1 continuity at 2", std::fabs(left - right) < 1e-5,
        "Psi'(2-) = " + fmt(left) + ", Psi'(2+) = " + fmt(right));

    // convexity on a 1000-point grid
    bool convex = true;
    double worst = 0;
    for (int k = 1; k + 1 <= 1000; ++k) {
        double u = 10.0 * k / 1000.0;
        double du = 10.0 / 1000.0;
        double d2 = psi_sobolev(u - du) + psi_sobolev(u + du) - 2.0 * psi_sobolev(u);
        if (d2 < -1e-12) {
            convex = false;
            worst = std::min(worst, d2);
        }
    }
    add(c, "convexity on a 1000-point grid", convex,
        convex ? "" : "second difference " + fmt(worst) + " at the branch point");

    bool monotone = true;
    double prev = 0;
    for (int k = 0; k <= 1000; ++k) {
        double u = 1.0 + 19.0 * k / 1000.0;
        double v = psi_sobolev(u) / u;
        if (v < prev - 1e-12) monotone = false;
        prev = v;
    }
    add(c, "Psi(u)/u non-decreasing on [1, inf)", monotone);

    // Psi-functional trace from the 1D oracle is non-increasing
    auto F = Potential::quadratic(1.0);
    DiscretizedGenerator d(F, 8.0, 1601);
    int n = d.size();
    std::vector<double> h0(static_cast<std::size_t>(n)), W(static_cast<std::size_t>(n));
    double mass = 0;
    for (int i = 0; i < n; ++i) {
        double x = d.node(i);
        h0[static_cast<std::size_t>(i)] = std::exp(-(x - 1.0) * (x - 1.0)) / std::exp(-x * x);
        W[static_cast<std::size_t>(i)] = 1.0 + x * x;
        mass += h0[static_cast<std::size_t>(i)] * d.weights()[static_cast<std::size_t>(i)];
    }
    for (auto& hh : h0) hh /= mass;
    EvolveOptions opts;
    opts.density_mode = true;
    opts.weight = W;
    opts.dt = 0.002;
    std::vector<double> tg;
    for (int k = 0; k <= 120; ++k) tg.push_back(0.1 * k);
    auto tr = semigroup_evolve(d, h0, tg, opts);
    bool dec = true;
    for (std::size_t k = 1; k < tr.psi_functional.size(); ++k)
        if (tr.psi_functional[k] >
            tr.psi_functional[k - 1] + 1e-12 * std::max(1.0, tr.psi_functional[k - 1]))
            dec = false;
    add(c, "Psi-functional trace non-increasing", dec,
        "start " + fmt(tr.psi_functional.front()) + " end " + fmt(tr.psi_functional.back()));
    return c;
}

Criterion criterion8() {
    Criterion c{8, "rate-formula closed forms", 120.0, {}, 0, false, ""};
    PsiProfile prof(PhiSpec::linear(1.0));
    double worst = 0;
    for (int k = 0; k <= 50; ++k) {
        double t = 10.0 * k / 50.0;
        worst = std::max(worst, std::fabs(prof.psi(t) * std::exp(t) - 1.0));
    }
    add(c, "psi linear identity < 1e-6", worst < 1e-6, "max defect " + fmt(worst));

    double bound = lp_truncation_bound(0.01, 1.0, 2.0);
    add(c, "truncation bound = 0.8 +- 1e-10", std::fabs(bound - 0.8) < 1e-10, fmt(bound));

    // monotonicity scans: psi, xi, beta_W, weak beta, truncation bound
    bool mono = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 50; ++k) {
        double v = prof.psi(0.2 * k);
        if (v > prev + 1e-12) mono = false;
        prev = v;
    }
    add(c, "psi non-increasing (50-point scan)", mono);

    XiProfile xi([](double) { return 0.7; }, 1.3);
    mono = true;
    prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 50; ++k) {
        double v = xi.xi(std::pow(10.0, -1.0 + 2.0 * k / 50.0));
        if (v > prev + 1e-12) mono = false;
        prev = v;
    }
    add(c, "xi non-increasing (50-point scan)", mono);

    auto F = Potential::quadratic(1.0);
    auto L = GeneratorSpec::overdamped(F);
    GibbsMeasure m(F, 8.0, 2001);
    auto V = LyapunovCandidate::custom(Expr::parse("1+x1^2", 1));
    BetaWDef bw(m, L, V, PhiSpec::log_power(1.0, 2.0));
    mono = true;
    prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 50; ++k) {
        double s = std::pow(10.0, -6.0 + 5.0 * k / 50.0);
        double v = bw.beta_w(s);
        if (v > prev + 1e-12) mono = false;
        prev = v;
    }
    add(c, "beta_W non-increasing (50-point scan)", mono);

    mono = true;
    prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 50; ++k) {
        double s = std::pow(10.0, -4.0 + 3.0 * k / 50.0);
        double v = weak_beta(xi, s) / s;  // beta/s is the decreasing shape
        if (v > prev * (1.0 + 1e-9)) mono = false;
        prev = v;
    }
    add(c, "weak beta shape non-increasing (50-point scan)", mono);

    mono = true;
    prev = 0;
    for (int k = 1; k <= 50; ++k) {
        double v = lp_truncation_bound(1e-4 * k, 1.0, 2.0);
        if (v < prev - 1e-15) mono = false;
        prev = v;
    }
    add(c, "truncation bound non-decreasing in xi (50-point scan)", mono);
    return c;
}

Criterion criterion9() {
    Criterion c{9, "reproducibility", 900.0, {}, 0, false, ""};

    auto read_tree = [](const fs::path& root) {
        std::map<std::string, std::string> files;
        for (auto& e : fs::recursive_directory_iterator(root)) {
            if (!e.is_regular_file()) continue;
            std::ifstream in(e.path(), std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            files[fs::relative(e.path(), root).string()] = ss.str();
        }
        return files;
    };

    fs::path base = fs::temp_directory_path() / "ergo-acceptance";
    fs::remove_all(base);
    for (const auto& name : catalog_names()) {
        RunContext ctx1, ctx2;
        ctx1.out_dir = (base / (name + "-1")).string();
        ctx2.out_dir = (base / (name + "-2")).string();
        ctx1.seed = ctx2.seed = 20240601;
        run_catalog(name, ctx1);
        run_catalog(name, ctx2);
        auto t1 = read_tree(ctx1.out_dir);
        auto t2 = read_tree(ctx2.out_dir);
        bool same = t1.size() == t2.size();
        std::string diff;
        if (same) {
            for (auto& [rel, content] : t1) {
                auto it = t2.find(rel);
                if (it == t2.end() || it->second != content) {
                    same = false;
                    diff = rel;
                    break;
                }
            }
        }
        add(c, "catalog " + name + " byte-identical across runs", same, diff);
    }

    // Monte Carlo 1 vs 8 workers
    auto F = Potential::quadratic(1.0);
    auto L = GeneratorSpec::overdamped(F);
    auto run_workers = [&](int workers) {
        mc::Ensemble e = mc::make_ensemble(L, 20000, 1e-3, 321);
        GibbsMeasure m(F, 8.0, 1201);
        auto xs = m.sample(e.size(), 321);
        for (std::size_t p = 0; p < e.size(); ++p) e.pos[p] = xs[p];
        std::vector<double> out;
        for (int s = 0; s < 500; ++s) {
            mc::step(e, L, workers);
            if (s % 50 == 0) {
                out.push_back(mc::mean_position_moment(e, 0, 1, workers));
                out.push_back(mc::mean_position_moment(e, 0, 2, workers));
            }
        }
        return out;
    };
    auto w1 = run_workers(1);
    auto w8 = run_workers(8);
    add(c, "Monte Carlo identical across 1 vs 8 workers", w1 == w8);
    fs::remove_all(base);
    return c;
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    std::vector<std::function<Criterion()>> criteria = {
        criterion1, criterion2, criterion3, criterion4, criterion5,
        criterion6, criterion7, criterion8, criterion9};

    int failures = 0;
    for (auto& fn : criteria) {
        auto start = clock::now();
        Criterion c{0, "unknown", 1e9, {}, 0, false, ""};
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.threw = true;
            c.error = e.what();
        }
        c.elapsed = std::chrono::duration<double>(clock::now() - start).count();
        bool pass = c.pass();
        if (!pass) ++failures;
        std::printf("criterion %d (%s): %s [%.1f s / budget %.0f s]\n", c.id, c.name.c_str(),
                    pass ? "PASS" : "FAIL", c.elapsed, c.budget_seconds);
        for (const auto& chk : c.checks) {
            std::printf("  %-48s %s%s%s\n", chk.label.c_str(), chk.pass ? "ok" : "FAILED",
                        chk.detail.empty() ? "" : "  -- ", chk.detail.c_str());
        }
        if (c.threw) std::printf("  exception: %s\n", c.error.c_str());
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all acceptance criteria passed\n");
    return failures == 0 ? 0 : 1;
}
