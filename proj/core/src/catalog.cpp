#include "ergo/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergo/config.hpp"
#include "ergo/errors.hpp"
#include "ergo/evolve.hpp"
#include "ergo/kinetic.hpp"
#include "ergo/local_poincare.hpp"
#include "ergo/montecarlo.hpp"
#include "ergo/muckenhoupt.hpp"
#include "ergo/rng.hpp"
#include "ergo/spectral.hpp"

namespace ergo {

namespace {

std::string num(double v) { return format_sig17(v); }

void meta_header(std::ostringstream& os, const RunContext& ctx, const std::string& scenario) {
    os << "# scenario = " << scenario << "\n";
    os << "# rng = " << CounterRng::kAlgorithm << "\n";
    os << "# seed = " << ctx.seed << "\n";
    os << "# threads = " << ctx.threads << "\n";
    os << "# xi_convention = " << (ctx.xi_convention == XiConvention::T ? "t" : "2t") << "\n";
}

std::string trace_csv(const SemigroupTrace& tr) {
    std::ostringstream os;
    tr.write_csv(os);
    return os.str();
}

std::string trace_csv(const McTrace& tr) {
    std::ostringstream os;
    tr.write_csv(os);
    return os.str();
}

std::string cert_report(const DriftCertificate& cert) {
    std::ostringstream os;
    cert.write_report(os);
    return os.str();
}

struct IntegratedDrift {
    double lhs = 0;  // alpha int V dmu
    double rhs = 0;  // b mu(C)
};

// alpha int V dmu <= b mu(C) for linear certificates, integrated over the
// verification measure.
IntegratedDrift integrated_drift_1d(const GeneratorSpec& L, const LyapunovCandidate& cand,
                                    double alpha, double b, const DriftSet& C,
                                    const GibbsMeasure& m) {
    IntegratedDrift out;
    for (int i = 0; i < m.grid_nodes(); ++i) {
        double x = m.node(i);
        double V = cand.value(L, {&x, 1});
        double w = m.weights()[static_cast<std::size_t>(i)];
        out.lhs += alpha * V * w;
        bool inside = C.kind == DriftSet::Kind::Sublevel ? V <= C.threshold
                                                         : std::fabs(x) <= C.threshold;
        if (inside) out.rhs += b * w;
    }
    return out;
}

IntegratedDrift integrated_drift_kinetic(const GeneratorSpec& L, const LyapunovCandidate& cand,
                                         double alpha, double b, const DriftSet& C,
                                         const KineticDiscretization& kd) {
    IntegratedDrift out;
    const auto& g = kd.grid();
    for (int i = 0; i < g.x.n; ++i) {
        for (int j = 0; j < g.v.n; ++j) {
            double pt[2] = {g.x.node(i), g.v.node(j)};
            double V = cand.value(L, pt);
            double w = kd.weights()[static_cast<std::size_t>(g.index(i, j))];
            out.lhs += alpha * V * w;
            bool inside = C.kind == DriftSet::Kind::Sublevel
                              ? V <= C.threshold
                              : std::hypot(pt[0], pt[1]) <= C.threshold;
            if (inside) out.rhs += b * w;
        }
    }
    return out;
}

// --- OU scenario ---------------------------------------------------------

std::string scenario_ou(const RunContext& ctx) {
    const std::string dir = ctx.out_dir + "/ou";
    auto F = Potential::quadratic(1.0);
    auto L = GeneratorSpec::overdamped(F);

    Config cfg;
    cfg.set("potential.kind", "quadratic");
    cfg.set("potential.kappa", "1");
    cfg.set("grid.box", "8");
    cfg.set("grid.n", "1601");
    cfg.set("localpoincare.u", "3");
    cfg.set("sim.horizon", "2000");
    cfg.set("sim.dt", "0.001");
    cfg.set("sim.seed", std::to_string(ctx.seed));
    write_file_atomic(dir + "/resolved.cfg", cfg.echo());

    std::ostringstream sum;
    meta_header(sum, ctx, "ou");

    // spectral oracle
    auto rep = spectral_gap(F, 8.0, 1601);
    sum << "lambda1 = " << num(rep.lambda1) << "\n";
    sum << "c_p = " << num(rep.c_p) << "\n";
    sum << "richardson_error = " << num(rep.richardson_error) << "\n";

    GibbsMeasure m(F, 8.0, 1601);
    auto mk = muckenhoupt(m);
    sum << "muckenhoupt_b = " << num(mk.b) << "\n";
    sum << "muckenhoupt_bracket_lo = " << num(mk.lower) << "\n";
    sum << "muckenhoupt_bracket_hi = " << num(mk.upper) << "\n";
    sum << "bracket_contains_c_p = " << ((mk.lower <= rep.c_p && rep.c_p <= mk.upper) ? 1 : 0)
        << "\n";

    auto lp = local_poincare(m, 3.0);
    sum << "kappa_u_numerical = " << num(lp.numerical) << "\n";
    sum << "kappa_u_bound = " << num(lp.bound) << "\n";
    sum << "mu_u = " << num(lp.mu_u) << "\n";

    // hand certificate V = 1 + x^2: LV = 1 - 2x^2 <= -V + 2 on {|x|<=sqrt2}
    auto V = LyapunovCandidate::custom(Expr::parse("1+x1^2", 1));
    VerifyGrid grid{Grid1D{-8, 8, 1601}, std::nullopt};
    auto hand = verify_drift(L, V, PhiSpec::linear(1.0), 2.0, DriftSet::ball(std::sqrt(2.0)),
                             grid);
    write_file_atomic(dir + "/certificate_hand.txt", cert_report(hand));
    auto bad = verify_drift(L, V, PhiSpec::linear(1.0), 1.0, DriftSet::ball(std::sqrt(2.0)),
                            grid);
    write_file_atomic(dir + "/certificate_hand_b1.txt", cert_report(bad));
    sum << "hand_certificate_valid = " << (hand.valid ? 1 : 0) << "\n";
    sum << "hand_b1_invalid = " << (!bad.valid ? 1 : 0) << "\n";

    auto fitres = fit_drift_params(L, V, PhiFamily::Linear, grid);
    write_file_atomic(dir + "/certificate_fit.txt", cert_report(fitres.certificate));
    sum << "fitted_alpha = " << num(fitres.level) << "\n";
    sum << "fitted_theta = " << num(fitres.theta) << "\n";
    sum << "fitted_b = " << num(fitres.certificate.b) << "\n";

    auto idr = integrated_drift_1d(L, V, 1.0, 2.0, DriftSet::ball(std::sqrt(2.0)), m);
    sum << "integrated_drift_lhs = " << num(idr.lhs) << "\n";
    sum << "integrated_drift_rhs = " << num(idr.rhs) << "\n";

    // Theorem constants: the hand drift in the -2 alpha V form has
    // alpha = 1/2; kappa_U converts to the carre-du-champ normalization.
    double kappa_gamma = lp.numerical / 2.0;
    double mu_u = m.mass(-3.0, 3.0);
    auto c = clp(0.5, 2.0, kappa_gamma, mu_u, 2);
    sum << "clp_lambda = " << num(c.lambda) << "\n";
    sum << "c_lp = " << num(c.c_lp) << "\n";

    // semigroup oracle: f = x with W = V + lambda
    DiscretizedGenerator d(F, 8.0, 1601);
    int n = d.size();
    std::vector<double> f0(static_cast<std::size_t>(n)), W(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = d.node(i);
        f0[static_cast<std::size_t>(i)] = x;
        W[static_cast<std::size_t>(i)] = 1.0 + x * x + c.lambda;
    }
    EvolveOptions fopts;
    fopts.density_mode = false;
    fopts.weight = W;
    fopts.dt = 0.002;
    std::vector<double> tg;
    for (int k = 0; k <= 120; ++k) tg.push_back(0.1 * k);
    auto ftr = semigroup_evolve(d, f0, tg, fopts);
    ftr.metadata.push_back("mode = function, f0 = x, W = 1 + x^2 + lambda");
    write_file_atomic(dir + "/evolve_function.csv", trace_csv(ftr));
    auto wfit = fit_exponential(ftr.times, ftr.weighted_variance);
    auto vfit = fit_exponential(ftr.times, ftr.variance);
    sum << "weighted_variance_rate = " << num(wfit.rate) << "\n";
    sum << "variance_rate = " << num(vfit.rate) << "\n";
    sum << "variance_rate_over_2lambda1 = " << num(vfit.rate / (2.0 * rep.lambda1)) << "\n";

    // density start for the entropy / TV / Psi traces
    std::vector<double> h0(static_cast<std::size_t>(n));
    double mass = 0;
    for (int i = 0; i < n; ++i) {
        double x = d.node(i);
        h0[static_cast<std::size_t>(i)] =
            std::exp(-(x - 1.0) * (x - 1.0)) / std::exp(-x * x);
        mass += h0[static_cast<std::size_t>(i)] * d.weights()[static_cast<std::size_t>(i)];
    }
    for (auto& h : h0) h /= mass;
    EvolveOptions dopts;
    dopts.density_mode = true;
    dopts.weight = W;
    dopts.dt = 0.002;
    auto dtr = semigroup_evolve(d, h0, tg, dopts);
    dtr.metadata.push_back("mode = density, h0 = gaussian blob at 1 / mu");
    write_file_atomic(dir + "/evolve_density.csv", trace_csv(dtr));
    bool psi_monotone = true;
    for (std::size_t k = 1; k < dtr.psi_functional.size(); ++k)
        if (dtr.psi_functional[k] >
            dtr.psi_functional[k - 1] + 1e-12 * std::max(1.0, dtr.psi_functional[k - 1]))
            psi_monotone = false;
    sum << "psi_trace_monotone = " << (psi_monotone ? 1 : 0) << "\n";

    // Monte Carlo: stationary autocovariance of f = x
    std::vector<double> lags;
    for (int k = 0; k <= 40; ++k) lags.push_back(0.05 * k);
    auto ac = mc::autocovariance_trace(L, Expr::parse("x1", 1), m, 2000.0, 1e-3, lags, ctx.seed);
    write_file_atomic(dir + "/autocov.csv", trace_csv(ac));
    auto acfit = mc::fit_rate(ac, mc::RateFit::Model::Geometric);
    sum << "autocov_rate = " << num(acfit.rho) << "\n";
    sum << "autocov_r2 = " << num(acfit.r2) << "\n";
    sum << "autocov_var0 = " << num(ac.values.front()) << "\n";

    std::string text = sum.str();
    write_file_atomic(dir + "/summary.txt", text);
    return text;
}

// --- sub-exponential scenario ----------------------------------------------

std::string scenario_subexp(const RunContext& ctx) {
    const std::string dir = ctx.out_dir + "/subexp-p05";
    auto F = Potential::power(0.5, 0.01);
    auto L = GeneratorSpec::overdamped(F);

    Config cfg;
    cfg.set("potential.kind", "power");
    cfg.set("potential.p", "0.5");
    cfg.set("potential.delta", "0.01");
    cfg.set("lyapunov.form", "exp_radial");
    cfg.set("lyapunov.a", "0.5");
    cfg.set("lyapunov.q", "0.5");
    cfg.set("phi.kind", "logpower");
    cfg.set("phi.r", "2");
    write_file_atomic(dir + "/resolved.cfg", cfg.echo());

    std::ostringstream sum;
    meta_header(sum, ctx, "subexp-p05");

    auto V = LyapunovCandidate::exp_radial(0.5, 0.5, 1.0);
    VerifyGrid grid{Grid1D{-400, 400, 8001}, std::nullopt};
    auto fit = fit_drift_params(L, V, PhiFamily::LogPower, grid, 2.0);
    write_file_atomic(dir + "/certificate.txt", cert_report(fit.certificate));
    sum << "certificate_valid = " << (fit.certificate.valid ? 1 : 0) << "\n";
    sum << "phi_c = " << num(fit.level) << "\n";
    sum << "phi_r = 2\n";
    sum << "b = " << num(fit.certificate.b) << "\n";

    PhiSpec phi = PhiSpec::log_power(fit.level, 2.0);
    GibbsMeasure m(F, 1600.0, 64001);
    BetaWDef bw(m, L, V, phi);
    sum << "beta_tail_floor = " << num(bw.tail_floor()) << "\n";
    sum << "int_V_dmu = " << num(bw.total_v_mass()) << "\n";

    // closed form inputs: c_p = int e^{-p_int F} dnu, eta from H_a
    double a = 0.5, p_int = 0.5;
    double c_p = integrate(m.grid(), [&](double x) { return std::exp(-p_int * F.value1(x)); });
    double c_eta = (1.0 - a / 2.0) * 0.25;  // (1 - a/2) p^2 at p = 1/2
    auto eta = [&](double u) { return c_eta * std::pow(u, -2.0); };
    sum << "c_p = " << num(c_p) << "\n";

    std::ostringstream beta_csv;
    meta_header(beta_csv, ctx, "subexp-p05 beta_w");
    beta_csv << "s,beta_w_def,beta_w_closed\n";
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    double ratio_lo = 1e300, ratio_hi = 0;
    for (int k = 0; k <= 40; ++k) {
        double s = std::pow(10.0, -8.0 + 5.0 * k / 40.0);
        double bd = bw.beta_w(s);
        double bc = beta_w_closed(a, p_int, c_p, eta, s);
        beta_csv << num(s) << ',' << num(bd) << ',' << num(bc) << '\n';
        double X = std::log(std::log(c_p / s));
        double Y = std::log(bd);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        ++cnt;
        if (s >= 1e-6 && s <= 1e-2) {
            double r = bd / bc;
            ratio_lo = std::min(ratio_lo, r);
            ratio_hi = std::max(ratio_hi, r);
        }
    }
    write_file_atomic(dir + "/beta_w.csv", beta_csv.str());
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    sum << "beta_w_slope = " << num(slope) << "\n";
    sum << "def_over_closed_lo = " << num(ratio_lo) << "\n";
    sum << "def_over_closed_hi = " << num(ratio_hi) << "\n";

    // C_w via case (1): R = inf phi, U a large interval.
    GibbsMeasure msmall(F, 60.0, 2401);
    auto lp = local_poincare(msmall, 30.0);
    double kappa_gamma = lp.numerical / 2.0;
    double mu_u = msmall.mass(-30.0, 30.0);
    auto cwres = cw(phi, fit.certificate.b, kappa_gamma, mu_u, 1);
    sum << "kappa_u = " << num(lp.numerical) << "\n";
    sum << "c_w = " << num(cwres.c_w) << "\n";
    sum << "cw_lambda = " << num(cwres.lambda) << "\n";

    double rmin = std::max(1e-12, 20.0 * bw.tail_floor());
    XiProfile xi([&](double r) { return bw.beta_w(r); }, cwres.c_w, ctx.xi_convention, rmin);
    std::ostringstream xi_csv;
    meta_header(xi_csv, ctx, "subexp-p05 xi");
    xi_csv << "t,xi\n";
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
        xi_csv << num(t) << ',' << num(v) << '\n';
        if (v <= 2e-2 && v >= 2e-14) {
            xtr.times.push_back(t);
            xtr.values.push_back(v);
            xtr.stderrs.push_back(0.0);
        }
    }
    write_file_atomic(dir + "/xi.csv", xi_csv.str());
    auto xfit = mc::fit_rate(xtr, mc::RateFit::Model::Subgeometric);
    sum << "xi_stretch_delta = " << num(xfit.delta) << "\n";
    sum << "xi_stretch_r2 = " << num(xfit.r2) << "\n";

    // weak beta from xi: shape comparison against beta_w.
    std::ostringstream wb_csv;
    meta_header(wb_csv, ctx, "subexp-p05 weak beta");
    wb_csv << "s,beta\n";
    double wsx = 0, wsy = 0, wsxx = 0, wsxy = 0;
    int wcnt = 0;
    for (int k = 0; k <= 10; ++k) {
        double s = std::pow(10.0, -5.0 + 3.0 * k / 10.0);
        double b = weak_beta(xi, s);
        wb_csv << num(s) << ',' << num(b) << '\n';
        if (b > 0) {
            double X = std::log(std::log(c_p / s));
            wsx += X;
            wsy += std::log(b);
            wsxx += X * X;
            wsxy += X * std::log(b);
            ++wcnt;
        }
    }
    write_file_atomic(dir + "/weak_beta.csv", wb_csv.str());
    double wslope = (wcnt * wsxy - wsx * wsy) / (wcnt * wsxx - wsx * wsx);
    sum << "weak_beta_slope = " << num(wslope) << "\n";
    sum << "slope_ratio = " << num(wslope / slope) << "\n";

    std::string text = sum.str();
    write_file_atomic(dir + "/summary.txt", text);
    return text;
}

// --- heavy tail scenario ----------------------------------------------------

std::string scenario_heavytail(const RunContext& ctx) {
    const std::string dir = ctx.out_dir + "/heavytail-p2";
    auto F = Potential::heavy_tail(2.0, 1);
    auto L = GeneratorSpec::overdamped(F);

    Config cfg;
    cfg.set("potential.kind", "heavytail");
    cfg.set("potential.p", "2");
    cfg.set("lyapunov.form", "power_radial");
    cfg.set("lyapunov.a", "0.225");
    write_file_atomic(dir + "/resolved.cfg", cfg.echo());

    std::ostringstream sum;
    meta_header(sum, ctx, "heavytail-p2");

    auto div = muckenhoupt_divergence(F, 50.0, 4001);
    sum << "muckenhoupt_diverges = " << (div.diverges ? 1 : 0) << "\n";
    for (std::size_t k = 0; k < div.b_values.size(); ++k)
        sum << "b_at_radius_" << div.radii[k] << " = " << num(div.b_values[k]) << "\n";

    // V = (1+|x|)^{a(d+p)/2} with a = 0.15; phi(u) = c u^{1 - 2/gamma}.
    double a = 0.15;
    double gamma = a * 1.5;
    auto V = LyapunovCandidate::power_radial(gamma);
    double kphi = 1.0 - 2.0 / gamma;
    Expr phi0 = Expr::parse("x1^(" + num(kphi) + ")", 1);
    VerifyGrid grid{Grid1D{-10000, 10000, 20001}, std::nullopt};
    auto fit = fit_drift_params(L, V, PhiFamily::General, grid, 1.0, &phi0);
    write_file_atomic(dir + "/certificate.txt", cert_report(fit.certificate));
    sum << "certificate_valid = " << (fit.certificate.valid ? 1 : 0) << "\n";
    sum << "phi_exponent = " << num(kphi) << "\n";
    sum << "phi_level = " << num(fit.level) << "\n";

    PhiSpec phi = PhiSpec::general(phi0).scaled(fit.level);
    GibbsMeasure m(F, 10000.0, 400001);
    BetaWDef bw(m, L, V, phi);
    sum << "beta_tail_floor = " << num(bw.tail_floor()) << "\n";

    std::ostringstream beta_csv;
    meta_header(beta_csv, ctx, "heavytail-p2 beta_w");
    beta_csv << "s,beta_w_def\n";
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = 0; k <= 32; ++k) {
        double s = std::pow(10.0, -6.0 + 4.0 * k / 32.0);
        double bd = bw.beta_w(s);
        beta_csv << num(s) << ',' << num(bd) << '\n';
        double X = std::log(1.0 / s);
        double Y = std::log(bd);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        ++cnt;
    }
    write_file_atomic(dir + "/beta_w.csv", beta_csv.str());
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    sum << "beta_w_poly_slope = " << num(slope) << "\n";
    sum << "predicted_slope = " << num(2.0 / (2.0 - gamma)) << "\n";

    std::string text = sum.str();
    write_file_atomic(dir + "/summary.txt", text);
    return text;
}

// --- kinetic scenarios -----------------------------------------------------

std::string scenario_kinetic_quadratic(const RunContext& ctx) {
    const std::string dir = ctx.out_dir + "/kinetic-quadratic";
    auto F = Potential::quadratic(1.0);
    auto L = GeneratorSpec::kinetic(F);
    // G smoothed |x| with curvature below c/(16 d) with a 1.25 safety.
    auto G = Potential::power(1.0, 20.0);

    Config cfg;
    cfg.set("potential.kind", "quadratic");
    cfg.set("potential.kappa", "1");
    cfg.set("generator.kind", "kinetic");
    cfg.set("kinetic.c", "1");
    cfg.set("kinetic.kappa", "1");
    cfg.set("kinetic.g_delta", "20");
    cfg.set("grid.box", "6");
    write_file_atomic(dir + "/resolved.cfg", cfg.echo());

    std::ostringstream sum;
    meta_header(sum, ctx, "kinetic-quadratic");

    auto feas = kinetic_param_search(1.0, 1.0, 1);
    sum << "feasible = " << (feas.feasible ? 1 : 0) << "\n";
    sum << "a = " << num(feas.a) << "\n";
    sum << "b = " << num(feas.b) << "\n";
    sum << "b_max = " << num(feas.b_max) << "\n";
    sum << "region_contains_a0.02_b0.1 = " << (feas.satisfies(0.02, 0.1) ? 1 : 0) << "\n";

    VerifyGrid grid{Grid1D{-6, 6, 121}, Grid1D{-6, 6, 121}};
    auto est = estimate_kinetic_constants(F, G, grid.x);
    sum << "estimate_liminf_inner = " << num(est.liminf_inner) << "\n";
    sum << "estimate_kappa = " << num(est.kappa) << "\n";
    sum << "estimate_hess_sup = " << num(est.hess_sup) << "\n";

    auto res = kinetic_search_and_verify(F, G, 1.0, 1.0, grid);
    write_file_atomic(dir + "/certificate.txt", cert_report(res.fit.certificate));
    sum << "certificate_valid = " << (res.fit.certificate.valid ? 1 : 0) << "\n";
    sum << "certificate_alpha = " << num(res.fit.level) << "\n";
    sum << "certificate_b = " << num(res.fit.certificate.b) << "\n";
    sum << "lambda_shift = " << num(res.shift) << "\n";

    // integrated drift for the linear kinetic certificate
    KineticGrid kg{Grid1D{-6, 6, 161}, Grid1D{-6, 6, 161}};
    KineticDiscretization kd(F, kg, /*adjoint=*/true);
    auto cand = LyapunovCandidate::kinetic_exp(feas.a, feas.b, G, res.shift);
    auto idr = integrated_drift_kinetic(L, cand, res.fit.level, res.fit.certificate.b,
                                        res.fit.certificate.set, kd);
    sum << "integrated_drift_lhs = " << num(idr.lhs) << "\n";
    sum << "integrated_drift_rhs = " << num(idr.rhs) << "\n";

    // 2D Fokker-Planck evolution from a shifted Gaussian.
    int nx = kg.x.n, nv = kg.v.n;
    std::vector<double> h0(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nv));
    double mass = 0;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nv; ++j) {
            double x = kg.x.node(i), v = kg.v.node(j);
            double rho = std::exp(-((x - 1.0) * (x - 1.0) + v * v) / (2.0 * 0.5));
            double mu = std::exp(-(v * v + 2.0 * F.value1(x)));
            std::size_t id = static_cast<std::size_t>(kg.index(i, j));
            h0[id] = rho / mu;
            mass += h0[id] * kd.weights()[id];
        }
    }
    for (auto& h : h0) h /= mass;
    std::vector<double> tg;
    for (int k = 0; k <= 80; ++k) tg.push_back(0.125 * k);
    auto tr = kinetic_evolve(kd, h0, tg, 0.01);
    tr.metadata.push_back("kinetic 161x161 implicit Euler dt = 0.01, shifted gaussian start");
    write_file_atomic(dir + "/evolve_density.csv", trace_csv(tr));
    double e0 = tr.entropy.front();
    double efloor = tr.entropy.back();
    auto efit = fit_exponential(tr.times, tr.entropy, nullptr, 0.6, 6.0 * efloor / e0);
    sum << "entropy_initial = " << num(e0) << "\n";
    sum << "entropy_floor = " << num(efloor) << "\n";
    sum << "entropy_rate = " << num(efit.rate) << "\n";
    sum << "entropy_r2 = " << num(efit.r2) << "\n";
    sum << "mass_drift_max = "
        << num(*std::max_element(tr.mass.begin(), tr.mass.end()) - 1.0) << "\n";

    std::string text = sum.str();
    write_file_atomic(dir + "/summary.txt", text);
    return text;
}

std::string scenario_kinetic_subexp(const RunContext& ctx) {
    const std::string dir = ctx.out_dir + "/kinetic-subexp";
    auto F = Potential::power(0.5, 0.1);
    auto L = GeneratorSpec::kinetic(F);
    double m_exp = 0.75;
    double delta = 0.5 / (m_exp + 1.0);
    double r = 1.0 / delta - 1.0;
    auto G = Potential::power(m_exp + 1.0, 0.2);

    Config cfg;
    cfg.set("potential.kind", "power");
    cfg.set("potential.p", "0.5");
    cfg.set("potential.delta", "0.1");
    cfg.set("generator.kind", "kinetic");
    cfg.set("lyapunov.form", "kinetic_exp_pow");
    cfg.set("lyapunov.s", "1");
    cfg.set("lyapunov.a", "0.05");
    cfg.set("lyapunov.b", "0.005");
    cfg.set("lyapunov.delta", num(delta));
    write_file_atomic(dir + "/resolved.cfg", cfg.echo());

    std::ostringstream sum;
    meta_header(sum, ctx, "kinetic-subexp");
    sum << "stretch_delta = " << num(delta) << "\n";
    sum << "phi_log_exponent = " << num(r) << "\n";

    VerifyGrid grid{Grid1D{-30, 30, 121}, Grid1D{-6, 6, 81}};
    double s_par = 1.0, a_par = 0.05, b_par = 0.005;
    auto raw = LyapunovCandidate::kinetic_exp_pow(a_par, b_par, s_par, delta, G, 0.0);
    double inf_exp = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.x.n; ++i)
        for (int j = 0; j < grid.v->n; ++j) {
            double pt[2] = {grid.x.node(i), grid.v->node(j)};
            inf_exp = std::min(inf_exp, std::log(raw.value(L, pt)));
        }
    auto cand = LyapunovCandidate::kinetic_exp_pow(a_par, b_par, s_par, delta,
                                                   Potential::power(m_exp + 1.0, 0.2), inf_exp);
    auto fit = fit_drift_params(L, cand, PhiFamily::LogPower, grid, r);
    write_file_atomic(dir + "/certificate.txt", cert_report(fit.certificate));
    sum << "certificate_valid = " << (fit.certificate.valid ? 1 : 0) << "\n";
    sum << "phi_c = " << num(fit.level) << "\n";
    sum << "b = " << num(fit.certificate.b) << "\n";

    // qualitative decay run; the sub-geometric fit is reported, not asserted
    KineticGrid kg{Grid1D{-20, 20, 161}, Grid1D{-6, 6, 121}};
    KineticDiscretization kd(F, kg, /*adjoint=*/true);
    int nx = kg.x.n, nv = kg.v.n;
    std::vector<double> h0(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nv));
    double mass = 0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nv; ++j) {
            double x = kg.x.node(i), v = kg.v.node(j);
            double rho = std::exp(-((x - 3.0) * (x - 3.0) + v * v) / (2.0 * 0.5));
            double mu = std::exp(-(v * v + 2.0 * F.value1(x)));
            std::size_t id = static_cast<std::size_t>(kg.index(i, j));
            h0[id] = rho / mu;
            mass += h0[id] * kd.weights()[id];
        }
    for (auto& h : h0) h /= mass;
    std::vector<double> tg;
    for (int k = 0; k <= 60; ++k) tg.push_back(0.25 * k);
    auto tr = kinetic_evolve(kd, h0, tg, 0.02);
    tr.metadata.push_back("kinetic 161x121 implicit Euler dt = 0.02, shifted gaussian start");
    write_file_atomic(dir + "/evolve_density.csv", trace_csv(tr));
    McTrace et;
    et.kind = "entropy";
    double e0 = tr.entropy.front();
    double efloor = tr.entropy.back();
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        if (tr.times[k] <= 0) continue;
        if (tr.entropy[k] < 6.0 * efloor || tr.entropy[k] > 0.6 * e0) continue;
        et.times.push_back(tr.times[k]);
        et.values.push_back(tr.entropy[k]);
        et.stderrs.push_back(0.0);
    }
    sum << "entropy_initial = " << num(e0) << "\n";
    sum << "entropy_floor = " << num(efloor) << "\n";
    if (et.times.size() >= 10) {
        auto sfit = mc::fit_rate(et, mc::RateFit::Model::Subgeometric);
        sum << "subgeometric_delta = " << num(sfit.delta) << "\n";
        sum << "subgeometric_rho = " << num(sfit.rho) << "\n";
        sum << "subgeometric_r2 = " << num(sfit.r2) << "\n";
    } else {
        sum << "subgeometric_fit = window-too-short\n";
    }

    std::string text = sum.str();
    write_file_atomic(dir + "/summary.txt", text);
    return text;
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"ou", "subexp-p05", "heavytail-p2", "kinetic-quadratic", "kinetic-subexp"};
}

std::string run_catalog(const std::string& name, const RunContext& ctx) {
    if (name == "ou") return scenario_ou(ctx);
    if (name == "subexp-p05") return scenario_subexp(ctx);
    if (name == "heavytail-p2") return scenario_heavytail(ctx);
    if (name == "kinetic-quadratic") return scenario_kinetic_quadratic(ctx);
    if (name == "kinetic-subexp") return scenario_kinetic_subexp(ctx);
    throw ConfigError("unknown catalog scenario '" + name + "' (ou, subexp-p05, heavytail-p2, "
                      "kinetic-quadratic, kinetic-subexp)");
}

std::string run_report(const RunContext& ctx) {
    // Comparison table assembled from the OU scenario plus the
    // sub-exponential exponents: theoretical constants against oracle and
    // empirical rates.
    std::string ou = run_catalog("ou", ctx);
    std::string sub = run_catalog("subexp-p05", ctx);

    auto pick = [](const std::string& text, const std::string& key) -> std::string {
        auto pos = text.find(key + " = ");
        if (pos == std::string::npos) return "nan";
        auto end = text.find('\n', pos);
        return text.substr(pos + key.size() + 3, end - pos - key.size() - 3);
    };
    auto round4 = [](const std::string& v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", std::stod(v));
        return std::string(buf);
    };

    std::ostringstream os;
    meta_header(os, ctx, "report");
    os << "quantity,theoretical,oracle,empirical\n";
    os << "poincare_constant," << pick(ou, "muckenhoupt_b") << ',' << pick(ou, "c_p") << ','
       << pick(ou, "autocov_rate") << "\n";
    os << "lyapunov_poincare_rate," << num(1.0 / std::stod(pick(ou, "c_lp"))) << ','
       << pick(ou, "weighted_variance_rate") << ",\n";
    os << "variance_rate_vs_2lambda1," << num(2.0 * std::stod(pick(ou, "lambda1"))) << ','
       << pick(ou, "variance_rate") << ",\n";
    os << "subexp_beta_w_slope,2," << pick(sub, "beta_w_slope") << ",\n";
    os << "subexp_xi_stretch," << num(1.0 / 3.0) << ',' << pick(sub, "xi_stretch_delta")
       << ",\n";
    write_file_atomic(ctx.out_dir + "/report/comparison.csv", os.str());

    std::ostringstream human;
    human << "quantity | theoretical | oracle | empirical\n";
    human << "poincare C_P | bracket [" << round4(pick(ou, "muckenhoupt_bracket_lo")) << ", "
          << round4(pick(ou, "muckenhoupt_bracket_hi")) << "] | " << round4(pick(ou, "c_p"))
          << " | rate " << round4(pick(ou, "autocov_rate")) << "\n";
    human << "1/C_LP (weighted decay) | " << round4(num(1.0 / std::stod(pick(ou, "c_lp"))))
          << " | " << round4(pick(ou, "weighted_variance_rate")) << " | -\n";
    human << "variance rate vs 2 lambda1 | "
          << round4(num(2.0 * std::stod(pick(ou, "lambda1")))) << " | "
          << round4(pick(ou, "variance_rate")) << " | -\n";
    human << "subexp beta_W slope | 2 | " << round4(pick(sub, "beta_w_slope")) << " | -\n";
    human << "subexp xi stretch | 0.3333 | " << round4(pick(sub, "xi_stretch_delta"))
          << " | -\n";
    write_file_atomic(ctx.out_dir + "/report/comparison.txt", human.str());
    return human.str();
}

}  // namespace ergo
