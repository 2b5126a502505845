// Command line front door: wires configs to the analysis pipeline and
// emits tables and plot-ready CSV. Exit codes: 0 ok, 2 config/schema
// error, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ergo/catalog.hpp"
#include "ergo/config.hpp"
#include "ergo/errors.hpp"
#include "ergo/evolve.hpp"
#include "ergo/kinetic.hpp"
#include "ergo/local_poincare.hpp"
#include "ergo/montecarlo.hpp"
#include "ergo/muckenhoupt.hpp"
#include "ergo/rates.hpp"
#include "ergo/rng.hpp"
#include "ergo/spectral.hpp"

namespace {

using namespace ergo;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int threads = 1;
    std::string xi_convention = "t";
};

RunContext make_context(const GlobalOpts& g) {
    RunContext ctx;
    ctx.out_dir = g.out_dir;
    ctx.seed = g.seed;
    ctx.threads = g.threads;
    if (g.xi_convention == "t") ctx.xi_convention = XiConvention::T;
    else if (g.xi_convention == "2t") ctx.xi_convention = XiConvention::TwoT;
    else throw ConfigError("--xi-convention must be t or 2t");
    return ctx;
}

Config load_config(const GlobalOpts& g) {
    if (g.config_path.empty()) throw ConfigError("this subcommand needs --config PATH");
    return Config::from_file(g.config_path);
}

void echo_config(const Config& cfg, const RunContext& ctx, const std::string& name) {
    write_file_atomic(ctx.out_dir + "/" + name + "/resolved.cfg", cfg.echo());
}

std::vector<double> parse_time_range(const std::string& spec) {
    // "0..10" or "0..10:200"
    auto dots = spec.find("..");
    if (dots == std::string::npos)
        throw ConfigError("time range must be lo..hi[:count], got '" + spec + "'");
    double lo = std::stod(spec.substr(0, dots));
    std::string rest = spec.substr(dots + 2);
    int count = 101;
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
        count = std::stoi(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    double hi = std::stod(rest);
    if (hi <= lo || count < 2) throw ConfigError("bad time range '" + spec + "'");
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(lo + (hi - lo) * i / (count - 1));
    return out;
}

const std::vector<std::string> kVerifySchema = {
    "potential.kind", "potential.p", "potential.delta", "potential.kappa", "potential.expr",
    "potential.d", "generator.kind", "generator.d", "generator.sigma1", "generator.sigma2",
    "generator.drift1", "generator.drift2", "lyapunov.form", "lyapunov.a", "lyapunov.b",
    "lyapunov.q", "lyapunov.m", "lyapunov.s", "lyapunov.delta", "lyapunov.alpha",
    "lyapunov.shift", "lyapunov.expr", "lyapunov.g.kind", "lyapunov.g.p", "lyapunov.g.delta",
    "lyapunov.g.kappa", "lyapunov.g.expr", "lyapunov.g.d", "phi.kind", "phi.alpha", "phi.c",
    "phi.r", "phi.expr", "drift.b", "drift.theta", "drift.ball", "drift.fit", "grid.box",
    "grid.n", "grid.vbox", "grid.nv"};

int cmd_verify(const GlobalOpts& g) {
    Config cfg = load_config(g);
    cfg.validate_schema(kVerifySchema);
    RunContext ctx = make_context(g);
    echo_config(cfg, ctx, "verify");

    GeneratorSpec L = build_generator(cfg);
    LyapunovCandidate cand = build_candidate(cfg, L);
    VerifyGrid grid{Grid1D{-cfg.get_double("grid.box", 8.0), cfg.get_double("grid.box", 8.0),
                           cfg.get_int("grid.n", 801)},
                    std::nullopt};
    if (L.is_kinetic())
        grid.v = Grid1D{-cfg.get_double("grid.vbox", 6.0), cfg.get_double("grid.vbox", 6.0),
                        cfg.get_int("grid.nv", 121)};

    DriftCertificate cert;
    if (cfg.get_bool("drift.fit", false)) {
        PhiFamily family = PhiFamily::Linear;
        std::string kind = cfg.get_string("phi.kind", "linear");
        double r = cfg.get_double("phi.r", 1.0);
        Expr phi_expr = Expr::constant(1.0);
        const Expr* pexpr = nullptr;
        if (kind == "logpower") family = PhiFamily::LogPower;
        else if (kind == "general") {
            family = PhiFamily::General;
            phi_expr = Expr::parse(cfg.get_string("phi.expr"), 1);
            pexpr = &phi_expr;
        }
        auto fit = fit_drift_params(L, cand, family, grid, r, pexpr);
        cert = fit.certificate;
    } else {
        PhiSpec phi = build_phi(cfg);
        double b = cfg.get_double("drift.b");
        DriftSet C = cfg.has("drift.ball") ? DriftSet::ball(cfg.get_double("drift.ball"))
                                           : DriftSet::sublevel(cfg.get_double("drift.theta"));
        cert = verify_drift(L, cand, phi, b, C, grid);
    }
    std::ostringstream os;
    cert.write_report(os);
    write_file_atomic(ctx.out_dir + "/verify/certificate.txt", os.str());
    std::cout << os.str();
    return cert.valid ? 0 : 3;
}

int cmd_rates(const GlobalOpts& g, const std::string& phi_arg, const std::string& t_arg) {
    RunContext ctx = make_context(g);
    PhiSpec phi = parse_phi_shorthand(phi_arg);
    PsiProfile prof(phi);
    auto ts = parse_time_range(t_arg);
    std::ostringstream os;
    os << "# rng = " << CounterRng::kAlgorithm << "\n";
    os << "# phi = " << phi.describe() << "\n";
    os << "t,psi\n";
    for (double t : ts) os << format_sig17(t) << ',' << format_sig17(prof.psi(t)) << '\n';
    write_file_atomic(ctx.out_dir + "/rates/psi.csv", os.str());
    std::cout << os.str();
    return 0;
}

const std::vector<std::string> kSpectralSchema = {
    "potential.kind", "potential.p", "potential.delta", "potential.kappa", "potential.expr",
    "potential.d", "grid.box", "grid.n", "localpoincare.u", "evolve.horizon", "evolve.dt",
    "evolve.mode", "evolve.center", "evolve.var"};

int cmd_spectral(const GlobalOpts& g) {
    Config cfg = load_config(g);
    cfg.validate_schema(kSpectralSchema);
    RunContext ctx = make_context(g);
    echo_config(cfg, ctx, "spectral");

    Potential F = build_potential(cfg);
    double box = cfg.get_double("grid.box", 8.0);
    int n = cfg.get_int("grid.n", 1601);

    auto rep = spectral_gap(F, box, n);
    std::ostringstream os;
    os << "lambda1 = " << format_sig17(rep.lambda1) << "\n";
    os << "c_p = " << format_sig17(rep.c_p) << "\n";
    os << "lambda1_refined = " << format_sig17(rep.lambda1_refined) << "\n";
    os << "richardson_error = " << format_sig17(rep.richardson_error) << "\n";
    os << "no_gap = " << (rep.no_gap ? 1 : 0) << "\n";

    GibbsMeasure m(F, box, n);
    auto mk = muckenhoupt(m);
    os << "muckenhoupt_b = " << format_sig17(mk.b) << "\n";
    os << "bracket_lo = " << format_sig17(mk.lower) << "\n";
    os << "bracket_hi = " << format_sig17(mk.upper) << "\n";
    if (cfg.has("localpoincare.u")) {
        auto lp = local_poincare(m, cfg.get_double("localpoincare.u"));
        os << "kappa_u_numerical = " << format_sig17(lp.numerical) << "\n";
        os << "kappa_u_bound = " << format_sig17(lp.bound) << "\n";
    }
    write_file_atomic(ctx.out_dir + "/spectral/report.txt", os.str());
    std::cout << os.str();

    if (cfg.has("evolve.horizon")) {
        DiscretizedGenerator d(F, box, n);
        double horizon = cfg.get_double("evolve.horizon");
        std::vector<double> tg;
        for (int k = 0; k <= 120; ++k) tg.push_back(horizon * k / 120.0);
        EvolveOptions opts;
        opts.dt = cfg.get_double("evolve.dt", 0.0);
        std::string mode = cfg.get_string("evolve.mode", "density");
        opts.density_mode = mode == "density";
        std::vector<double> init(static_cast<std::size_t>(d.size()));
        double center = cfg.get_double("evolve.center", 1.0);
        double var = cfg.get_double("evolve.var", 0.5);
        if (opts.density_mode) {
            double mass = 0;
            for (int i = 0; i < d.size(); ++i) {
                double x = d.node(i);
                init[static_cast<std::size_t>(i)] =
                    std::exp(-(x - center) * (x - center) / (2 * var)) /
                    std::exp(-2.0 * F.value1(x));
                mass += init[static_cast<std::size_t>(i)] *
                        d.weights()[static_cast<std::size_t>(i)];
            }
            for (auto& h : init) h /= mass;
        } else {
            for (int i = 0; i < d.size(); ++i) init[static_cast<std::size_t>(i)] = d.node(i);
        }
        auto tr = semigroup_evolve(d, init, tg, opts);
        std::ostringstream ts;
        tr.write_csv(ts);
        write_file_atomic(ctx.out_dir + "/spectral/trace.csv", ts.str());
    }
    return 0;
}

const std::vector<std::string> kSimulateSchema = {
    "potential.kind", "potential.p", "potential.delta", "potential.kappa", "potential.expr",
    "potential.d", "generator.kind", "generator.d", "generator.sigma1", "generator.drift1",
    "sim.kind", "sim.n", "sim.dt", "sim.horizon", "sim.f", "sim.lags", "sim.bins",
    "sim.center", "sim.var", "grid.box", "grid.n"};

int cmd_simulate(const GlobalOpts& g) {
    Config cfg = load_config(g);
    cfg.validate_schema(kSimulateSchema);
    RunContext ctx = make_context(g);
    echo_config(cfg, ctx, "simulate");

    GeneratorSpec L = build_generator(cfg);
    double box = cfg.get_double("grid.box", 8.0);
    int n = cfg.get_int("grid.n", 1601);
    GibbsMeasure m(build_potential(cfg), box, n);

    std::string kind = cfg.get_string("sim.kind", "autocov");
    double dt = cfg.get_double("sim.dt", 1e-3);
    double horizon = cfg.get_double("sim.horizon", 1000.0);

    if (kind == "autocov") {
        Expr f = Expr::parse(cfg.get_string("sim.f", "x1"), 1);
        int nlags = cfg.get_int("sim.lags", 40);
        std::vector<double> lags;
        for (int k = 0; k <= nlags; ++k) lags.push_back(0.05 * k);
        auto tr = mc::autocovariance_trace(L, f, m, horizon, dt, lags, ctx.seed);
        std::ostringstream os;
        tr.write_csv(os);
        write_file_atomic(ctx.out_dir + "/simulate/autocov.csv", os.str());
        auto fit = mc::fit_rate(tr, mc::RateFit::Model::Geometric);
        std::cout << "rate = " << format_sig17(fit.rho) << "\nr2 = " << format_sig17(fit.r2)
                  << "\n";
        return 0;
    }
    if (kind == "density") {
        mc::DensityTraceOptions opts;
        opts.particles = static_cast<std::size_t>(cfg.get_int("sim.n", 100000));
        opts.dt = dt;
        opts.bins = cfg.get_int("sim.bins", 64);
        opts.workers = ctx.threads;
        auto law = mc::InitialLaw::shifted_gaussian(cfg.get_double("sim.center", 1.0),
                                                    std::sqrt(cfg.get_double("sim.var", 0.25)));
        std::vector<double> tg;
        for (int k = 0; k <= 40; ++k) tg.push_back(horizon * k / 40.0);
        auto traces = mc::ensemble_density_trace(L, law, m, tg, ctx.seed, opts);
        std::ostringstream e1, e2, e3;
        traces.entropy.write_csv(e1);
        traces.tv.write_csv(e2);
        traces.psi.write_csv(e3);
        write_file_atomic(ctx.out_dir + "/simulate/entropy.csv", e1.str());
        write_file_atomic(ctx.out_dir + "/simulate/tv.csv", e2.str());
        write_file_atomic(ctx.out_dir + "/simulate/psi.csv", e3.str());
        auto fit = mc::fit_rate(traces.entropy, mc::RateFit::Model::Geometric);
        std::cout << "entropy_rate = " << format_sig17(fit.rho) << "\nr2 = "
                  << format_sig17(fit.r2) << "\n";
        if (traces.empty_bin_warning)
            std::cout << "warning: empty bins covered > 20% of mu-mass; widen bins\n";
        return 0;
    }
    throw ConfigError("sim.kind must be autocov or density");
}

const std::vector<std::string> kKineticSchema = {
    "potential.kind", "potential.p", "potential.delta", "potential.kappa", "potential.expr",
    "potential.d", "kinetic.c", "kinetic.kappa", "kinetic.g_delta", "grid.box", "grid.n",
    "grid.vbox", "grid.nv", "evolve.horizon", "evolve.dt"};

int cmd_kinetic(const GlobalOpts& g) {
    Config cfg = load_config(g);
    cfg.validate_schema(kKineticSchema);
    RunContext ctx = make_context(g);
    echo_config(cfg, ctx, "kinetic");

    Potential F = build_potential(cfg);
    double c = cfg.get_double("kinetic.c", 1.0);
    double kp = cfg.get_double("kinetic.kappa", 1.0);
    auto G = Potential::power(1.0, cfg.get_double("kinetic.g_delta", 16.0 / c * 1.25));

    double box = cfg.get_double("grid.box", 6.0);
    double vbox = cfg.get_double("grid.vbox", 6.0);
    VerifyGrid grid{Grid1D{-box, box, cfg.get_int("grid.n", 121)},
                    Grid1D{-vbox, vbox, cfg.get_int("grid.nv", 121)}};

    auto res = kinetic_search_and_verify(F, G, c, kp, grid);
    std::ostringstream os;
    os << "feasible = " << (res.feasibility.feasible ? 1 : 0) << "\n";
    os << "a = " << format_sig17(res.feasibility.a) << "\n";
    os << "b = " << format_sig17(res.feasibility.b) << "\n";
    os << "b_max = " << format_sig17(res.feasibility.b_max) << "\n";
    os << "certificate_valid = " << (res.fit.certificate.valid ? 1 : 0) << "\n";
    std::ostringstream cs;
    res.fit.certificate.write_report(cs);
    write_file_atomic(ctx.out_dir + "/kinetic/certificate.txt", cs.str());
    write_file_atomic(ctx.out_dir + "/kinetic/search.txt", os.str());
    std::cout << os.str();

    if (cfg.has("evolve.horizon")) {
        KineticGrid kg{Grid1D{-box, box, 161}, Grid1D{-vbox, vbox, 161}};
        KineticDiscretization kd(F, kg, true);
        int nx = kg.x.n, nv = kg.v.n;
        std::vector<double> h0(static_cast<std::size_t>(nx) * static_cast<std::size_t>(nv));
        double mass = 0;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nv; ++j) {
                double x = kg.x.node(i), v = kg.v.node(j);
                double rho = std::exp(-((x - 1.0) * (x - 1.0) + v * v));
                double mu = std::exp(-(v * v + 2.0 * F.value1(x)));
                std::size_t id = static_cast<std::size_t>(kg.index(i, j));
                h0[id] = rho / mu;
                mass += h0[id] * kd.weights()[id];
            }
        for (auto& h : h0) h /= mass;
        double horizon = cfg.get_double("evolve.horizon");
        std::vector<double> tg;
        for (int k = 0; k <= 80; ++k) tg.push_back(horizon * k / 80.0);
        auto tr = kinetic_evolve(kd, h0, tg, cfg.get_double("evolve.dt", 0.01));
        std::ostringstream ts;
        tr.write_csv(ts);
        write_file_atomic(ctx.out_dir + "/kinetic/evolve_density.csv", ts.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergodic rate toolkit: drift certificates, Poincare-type constants, "
                 "semigroup oracles and Langevin simulation"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "key=value config file");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "master RNG seed");
    app.add_option("--threads", g.threads, "worker threads for particle updates");
    app.add_option("--xi-convention", g.xi_convention, "xi threshold convention: t or 2t");

    auto* verify = app.add_subcommand("verify", "check a drift certificate");
    auto* rates = app.add_subcommand("rates", "evaluate rate formulas to CSV");
    std::string phi_arg = "linear:1", t_arg = "0..10:101";
    rates->add_option("--phi", phi_arg, "phi shorthand: linear:a | logpower:c,r | general:EXPR");
    rates->add_option("--t", t_arg, "time range lo..hi[:count]");
    auto* spectral = app.add_subcommand("spectral", "spectral gap, brackets, semigroup traces");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo traces and fits");
    auto* kinetic = app.add_subcommand("kinetic", "kinetic feasibility, certificate, decay");
    auto* report = app.add_subcommand("report", "consolidated comparison table");
    auto* catalog = app.add_subcommand("catalog", "run a named built-in scenario");
    std::string catalog_name;
    catalog->add_option("name", catalog_name, "one of: ou, subexp-p05, heavytail-p2, "
                                              "kinetic-quadratic, kinetic-subexp")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (*verify) return cmd_verify(g);
        if (*rates) return cmd_rates(g, phi_arg, t_arg);
        if (*spectral) return cmd_spectral(g);
        if (*simulate) return cmd_simulate(g);
        if (*kinetic) return cmd_kinetic(g);
        if (*report) {
            std::cout << run_report(make_context(g));
            return 0;
        }
        if (*catalog) {
            std::cout << run_catalog(catalog_name, make_context(g));
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
