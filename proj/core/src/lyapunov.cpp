#include "ergo/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ergo/errors.hpp"
#include "ergo/trace.hpp"

namespace ergo {

namespace {

std::string num(double v) { return format_sig17(v); }

// g(r) for the ExpRadial candidate and its first two radial derivatives.
struct RadialExponent {
    double a, q, M, c0, c2, c4;

    double g(double r) const {
        if (r >= M) return a * std::pow(r, q);
        double r2 = r * r;
        return c0 + c2 * r2 + c4 * r2 * r2;
    }
    double dg(double r) const {
        if (r >= M) return a * q * std::pow(r, q - 1.0);
        return 2 * c2 * r + 4 * c4 * r * r * r;
    }
    double d2g(double r) const {
        if (r >= M) return a * q * (q - 1.0) * std::pow(r, q - 2.0);
        return 2 * c2 + 12 * c4 * r * r;
    }
};

RadialExponent radial_exponent(const LyapunovCandidate::ExpRadial& e) {
    return {e.a, e.q, e.matching_radius, e.c0, e.c2, e.c4};
}

double sqnorm(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

// Lambda_{a,b} pieces for the kinetic candidates (1D position).
struct KineticFrame {
    double x, v, F, dF, Gv, dG, d2G;
};

KineticFrame kinetic_frame(const GeneratorSpec& L, const Potential* G, double alpha,
                           std::span<const double> xv) {
    if (!L.is_kinetic()) throw ConfigError("kinetic candidate used with non-kinetic generator");
    if (L.position_dimension() != 1)
        throw ConfigError("kinetic candidates support 1D position only");
    KineticFrame f{};
    f.x = xv[0];
    f.v = xv[1];
    const Potential& F = L.potential();
    f.F = F.value({&f.x, 1});
    f.dF = F.grad({&f.x, 1})(0);
    if (G != nullptr) {
        f.Gv = G->value({&f.x, 1});
        f.dG = G->grad({&f.x, 1})(0);
        f.d2G = G->hessian({&f.x, 1})(0, 0);
    } else {
        // G = F^{1 - alpha}
        double Fv = f.F;
        if (Fv <= 0) throw NumericalError("G = F^(1-alpha) needs F > 0 on the grid");
        double d2F = F.hessian({&f.x, 1})(0, 0);
        double p = 1.0 - alpha;
        f.Gv = std::pow(Fv, p);
        f.dG = p * std::pow(Fv, p - 1.0) * f.dF;
        f.d2G = p * std::pow(Fv, p - 1.0) * d2F + p * (p - 1.0) * std::pow(Fv, p - 2.0) * f.dF * f.dF;
    }
    return f;
}

double lambda_ab(double a, double b, const KineticFrame& f) {
    return a * (f.v * f.v + 2.0 * f.F) + b * (f.v * f.dG + f.Gv);
}

// L Lambda_{a,b} = ad + b<G'' v, v> - 2a|v|^2 - b<grad F, grad G>
double l_lambda(double a, double b, const KineticFrame& f) {
    return a + b * f.d2G * f.v * f.v - 2.0 * a * f.v * f.v - b * f.dF * f.dG;
}

// Gamma(Lambda) = |grad_v Lambda|^2 = |2 a v + b G'|^2
double gamma_lambda(double a, double b, const KineticFrame& f) {
    double gv = 2.0 * a * f.v + b * f.dG;
    return gv * gv;
}

}  // namespace

LyapunovCandidate LyapunovCandidate::exp_potential(double a, Potential F) {
    if (a <= 0) throw ConfigError("exp_potential requires a > 0");
    return LyapunovCandidate(ExpPotential{a, std::move(F)});
}

LyapunovCandidate LyapunovCandidate::exp_radial(double a, double q, double M) {
    if (a <= 0 || q <= 0 || M <= 0) throw ConfigError("exp_radial requires a, q, M > 0");
    ExpRadial e{a, q, M, 0, 0, 0};
    // Even C^2 bridge c0 + c2 r^2 + c4 r^4 matching value and two
    // derivatives of a r^q at r = M.
    e.c4 = a * q * (q - 2.0) * std::pow(M, q - 4.0) / 8.0;
    e.c2 = a * q * (4.0 - q) * std::pow(M, q - 2.0) / 4.0;
    e.c0 = a * std::pow(M, q) * (1.0 - 0.75 * q + q * q / 8.0);
    if (e.c0 < 0)
        throw ConfigError("exp_radial bridge dips below 1; increase the matching radius");
    return LyapunovCandidate(std::move(e));
}

LyapunovCandidate LyapunovCandidate::power_radial(double a) {
    if (a <= 0) throw ConfigError("power_radial requires a > 0");
    return LyapunovCandidate(PowerRadial{a});
}

LyapunovCandidate LyapunovCandidate::kinetic_exp(double a, double b, Potential G, double shift) {
    if (a <= 0 || b <= 0) throw ConfigError("kinetic_exp requires a, b > 0");
    return LyapunovCandidate(
        KineticExp{a, b, std::make_shared<Potential>(std::move(G)), shift});
}

LyapunovCandidate LyapunovCandidate::kinetic_affine(double a, double b, Potential G, double M) {
    return LyapunovCandidate(
        KineticAffine{a, b, std::make_shared<Potential>(std::move(G)), -1.0, M});
}

LyapunovCandidate LyapunovCandidate::kinetic_affine_from_alpha(double a, double b, double alpha,
                                                               double M) {
    if (alpha < 0 || alpha >= 1) throw ConfigError("kinetic affine alpha must lie in [0, 1)");
    return LyapunovCandidate(KineticAffine{a, b, nullptr, alpha, M});
}

LyapunovCandidate LyapunovCandidate::kinetic_exp_pow(double a, double b, double s, double delta,
                                                     Potential G, double shift) {
    if (a <= 0 || b <= 0 || s <= 0) throw ConfigError("kinetic_exp_pow requires a, b, s > 0");
    if (delta <= 0 || delta > 1) throw ConfigError("kinetic_exp_pow requires delta in (0, 1]");
    return LyapunovCandidate(
        KineticExpPow{a, b, s, delta, std::make_shared<Potential>(std::move(G)), shift});
}

LyapunovCandidate LyapunovCandidate::custom(Expr expr) {
    return LyapunovCandidate(Custom{std::move(expr)});
}

double LyapunovCandidate::value(const GeneratorSpec& L, std::span<const double> x) const {
    if (auto* f = std::get_if<ExpPotential>(&form_)) return std::exp(f->a * f->F.value(x));
    if (auto* f = std::get_if<ExpRadial>(&form_))
        return std::exp(radial_exponent(*f).g(std::sqrt(sqnorm(x))));
    if (auto* f = std::get_if<PowerRadial>(&form_))
        return std::pow(1.0 + std::sqrt(sqnorm(x)), f->a);
    if (auto* f = std::get_if<KineticExp>(&form_)) {
        auto fr = kinetic_frame(L, f->G.get(), -1, x);
        return std::exp(lambda_ab(f->a, f->b, fr) - f->shift);
    }
    if (auto* f = std::get_if<KineticAffine>(&form_)) {
        auto fr = kinetic_frame(L, f->G.get(), f->alpha, x);
        return lambda_ab(f->a, f->b, fr) + f->M;
    }
    if (auto* f = std::get_if<KineticExpPow>(&form_)) {
        auto fr = kinetic_frame(L, f->G.get(), -1, x);
        double lam = lambda_ab(f->a, f->b, fr);
        if (lam <= 0)
            throw NumericalError("kinetic_exp_pow needs Lambda > 0 on the grid (offset G)");
        return std::exp(f->s * std::pow(lam, f->delta) - f->shift);
    }
    return std::get<Custom>(form_).expr.eval(x);
}

double LyapunovCandidate::apply_generator(const GeneratorSpec& L,
                                          std::span<const double> x) const {
    if (auto* f = std::get_if<ExpPotential>(&form_)) {
        if (!L.is_overdamped())
            throw ConfigError("exp_potential candidates pair with overdamped generators");
        double V = std::exp(f->a * f->F.value(x));
        return f->a * V * h_a(f->F, f->a, x);
    }
    if (auto* f = std::get_if<ExpRadial>(&form_)) {
        if (!L.is_overdamped() || L.state_dimension() != 1)
            throw ConfigError("exp_radial supports 1D overdamped generators");
        auto rad = radial_exponent(*f);
        double r = std::fabs(x[0]);
        double sgn = x[0] >= 0 ? 1.0 : -1.0;
        double V = std::exp(rad.g(r));
        double dV = sgn * rad.dg(r) * V;
        double d2V = (rad.d2g(r) + rad.dg(r) * rad.dg(r)) * V;
        double dF = L.potential().grad(x)(0);
        return 0.5 * d2V - dF * dV;
    }
    if (auto* f = std::get_if<PowerRadial>(&form_)) {
        if (!L.is_overdamped() || L.state_dimension() != 1)
            throw ConfigError("power_radial supports 1D overdamped generators");
        double r = std::fabs(x[0]);
        double sgn = x[0] >= 0 ? 1.0 : (x[0] < 0 ? -1.0 : 0.0);
        double dV = f->a * sgn * std::pow(1.0 + r, f->a - 1.0);
        double d2V = f->a * (f->a - 1.0) * std::pow(1.0 + r, f->a - 2.0);
        double dF = L.potential().grad(x)(0);
        return 0.5 * d2V - dF * dV;
    }
    if (auto* f = std::get_if<KineticExp>(&form_)) {
        auto fr = kinetic_frame(L, f->G.get(), -1, x);
        double V = std::exp(lambda_ab(f->a, f->b, fr) - f->shift);
        double a = f->a, b = f->b;
        double lv_over_v = -2.0 * a * (1.0 - a) * fr.v * fr.v + a + 2.0 * a * b * fr.v * fr.dG +
                           0.5 * b * b * fr.dG * fr.dG + b * fr.d2G * fr.v * fr.v -
                           b * fr.dF * fr.dG;
        return lv_over_v * V;
    }
    if (auto* f = std::get_if<KineticAffine>(&form_)) {
        auto fr = kinetic_frame(L, f->G.get(), f->alpha, x);
        return l_lambda(f->a, f->b, fr);
    }
    if (auto* f = std::get_if<KineticExpPow>(&form_)) {
        auto fr = kinetic_frame(L, f->G.get(), -1, x);
        double lam = lambda_ab(f->a, f->b, fr);
        if (lam <= 0)
            throw NumericalError("kinetic_exp_pow needs Lambda > 0 on the grid (offset G)");
        double V = std::exp(f->s * std::pow(lam, f->delta) - f->shift);
        double s = f->s, d = f->delta;
        double first = s * d * std::pow(lam, d - 1.0);
        double second = s * d * (d - 1.0) * std::pow(lam, d - 2.0) +
                        first * first;  // psi''/psi with psi = e^{s u^d}
        return V * (first * l_lambda(f->a, f->b, fr) +
                    0.5 * second * gamma_lambda(f->a, f->b, fr));
    }
    // Custom: finite differences through a throwaway custom potential.
    const auto& e = std::get<Custom>(form_).expr;
    Potential tmp = Potential::custom(e);
    Vector g = tmp.grad(x);
    Matrix h = tmp.hessian(x);
    if (L.is_overdamped()) {
        Vector gF = L.potential().grad(x);
        return 0.5 * h.trace() - gF.dot(g);
    }
    if (L.is_kinetic()) {
        int d = L.position_dimension();
        Vector gF = L.potential().grad(x.first(static_cast<std::size_t>(d)));
        double s = 0;
        for (int i = 0; i < d; ++i) {
            double v = x[static_cast<std::size_t>(d + i)];
            s += 0.5 * h(d + i, d + i) + v * g(i) - (v + gF(i)) * g(d + i);
        }
        return s;
    }
    const auto& gd = std::get<GeneralDiffusionKind>(L.kind());
    double s = 0;
    for (int i = 0; i < L.state_dimension(); ++i) {
        double sig = gd.sigma[static_cast<std::size_t>(i)];
        s += 0.5 * sig * sig * h(i, i) + gd.drift[static_cast<std::size_t>(i)].eval(x) * g(i);
    }
    return s;
}

std::string LyapunovCandidate::describe() const {
    if (auto* f = std::get_if<ExpPotential>(&form_))
        return "exp(" + num(f->a) + "*F), F = " + f->F.print();
    if (auto* f = std::get_if<ExpRadial>(&form_))
        return "exp_radial(a=" + num(f->a) + ", q=" + num(f->q) +
               ", M=" + num(f->matching_radius) + ")";
    if (auto* f = std::get_if<PowerRadial>(&form_)) return "(1+|x|)^" + num(f->a);
    if (auto* f = std::get_if<KineticExp>(&form_))
        return "exp(Lambda_{a=" + num(f->a) + ",b=" + num(f->b) + "} - " + num(f->shift) +
               "), G = " + f->G->print();
    if (auto* f = std::get_if<KineticAffine>(&form_)) {
        std::string g = f->G ? ("G = " + f->G->print())
                             : ("G = F^" + num(1.0 - f->alpha));
        return "Lambda_{a=" + num(f->a) + ",b=" + num(f->b) + "} + " + num(f->M) + ", " + g;
    }
    if (auto* f = std::get_if<KineticExpPow>(&form_))
        return "exp(" + num(f->s) + "*Lambda_{a=" + num(f->a) + ",b=" + num(f->b) + "}^" +
               num(f->delta) + " - " + num(f->shift) + "), G = " + f->G->print();
    return "custom(" + std::get<Custom>(form_).expr.print() + ")";
}

std::string DriftSet::describe() const {
    if (kind == Kind::Sublevel) return "{V <= " + num(threshold) + "}";
    return "{|x| <= " + num(threshold) + "}";
}

void DriftCertificate::write_report(std::ostream& os) const {
    os << "drift certificate\n";
    os << "  candidate: " << candidate << "\n";
    os << "  phi: " << phi << "\n";
    os << "  b: " << num(b) << "\n";
    os << "  set: " << set.describe() << "\n";
    os << "  grid: " << grid_spec << "\n";
    os << "  valid: " << (valid ? "VALID" : "INVALID") << "\n";
    os << "  worst_margin: " << num(worst_margin) << "\n";
    os << "  worst_node:";
    for (double v : worst_node) os << ' ' << num(v);
    os << "\n";
    os << "  margin_scale: " << num(margin_scale) << "\n";
    os << "  tol: " << num(tol) << "\n";
    for (const auto& [k, v] : parameters) os << "  " << k << ": " << num(v) << "\n";
}

namespace {

std::vector<std::vector<double>> grid_points(const VerifyGrid& grid) {
    std::vector<std::vector<double>> pts;
    if (!grid.kinetic()) {
        pts.reserve(static_cast<std::size_t>(grid.x.n));
        for (int i = 0; i < grid.x.n; ++i) pts.push_back({grid.x.node(i)});
    } else {
        pts.reserve(static_cast<std::size_t>(grid.x.n) * static_cast<std::size_t>(grid.v->n));
        for (int i = 0; i < grid.x.n; ++i)
            for (int j = 0; j < grid.v->n; ++j)
                pts.push_back({grid.x.node(i), grid.v->node(j)});
    }
    return pts;
}

std::string grid_spec_string(const VerifyGrid& grid) {
    std::string s = "x in [" + num(grid.x.lo) + ", " + num(grid.x.hi) + "], n = " +
                    std::to_string(grid.x.n);
    if (grid.kinetic())
        s += "; v in [" + num(grid.v->lo) + ", " + num(grid.v->hi) + "], n = " +
             std::to_string(grid.v->n);
    return s;
}

bool in_set(const DriftSet& C, double V, const std::vector<double>& pt) {
    if (C.kind == DriftSet::Kind::Sublevel) return V <= C.threshold;
    double s = 0;
    for (double v : pt) s += v * v;
    return std::sqrt(s) <= C.threshold;
}

}  // namespace

DriftCertificate verify_drift(const GeneratorSpec& L, const LyapunovCandidate& cand,
                              const PhiSpec& phi, double b, const DriftSet& C,
                              const VerifyGrid& grid) {
    auto pts = grid_points(grid);
    std::vector<double> V(pts.size()), LV(pts.size());
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -vmin;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        V[k] = cand.value(L, pts[k]);
        LV[k] = cand.apply_generator(L, pts[k]);
        vmin = std::min(vmin, V[k]);
        vmax = std::max(vmax, V[k]);
    }
    if (vmin < 1.0 - 1e-9)
        throw ConfigError("candidate violates V >= 1 on the grid (min V = " +
                          std::to_string(vmin) + ")");
    if (C.kind == DriftSet::Kind::Sublevel && C.threshold >= vmax)
        throw ConfigError("grid does not contain C with a margin band (sublevel covers the grid)");
    if (C.kind == DriftSet::Kind::Ball) {
        double rmax = std::fabs(grid.x.hi);
        if (grid.kinetic()) rmax = std::hypot(grid.x.hi, grid.v->hi);
        if (C.threshold >= rmax)
            throw ConfigError("grid does not contain C with a margin band (ball covers the grid)");
    }

    DriftCertificate cert;
    cert.candidate = cand.describe();
    cert.phi = phi.describe();
    cert.b = b;
    cert.set = C;
    cert.grid_spec = grid_spec_string(grid);

    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_idx = 0;
    double scale = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        double margin = -LV[k] - phi(V[k]) + (in_set(C, V[k], pts[k]) ? b : 0.0);
        scale = std::max(scale, std::fabs(LV[k]));
        if (margin < worst) {
            worst = margin;
            worst_idx = k;
        }
    }
    cert.worst_margin = worst;
    cert.worst_node = pts[worst_idx];
    cert.margin_scale = scale;
    cert.tol = kDriftTol * std::max(scale, 1.0);
    cert.valid = worst >= -cert.tol;
    return cert;
}

FitResult fit_drift_params(const GeneratorSpec& L, const LyapunovCandidate& cand,
                           PhiFamily family, const VerifyGrid& grid, double log_power_r,
                           const Expr* general_phi) {
    auto pts = grid_points(grid);
    std::size_t n = pts.size();
    std::vector<double> V(n), LV(n), phi0(n), ratio(n);

    auto phi0_of = [&](double u) -> double {
        switch (family) {
            case PhiFamily::Linear: return u;
            case PhiFamily::LogPower: return u * std::pow(std::log(M_E + u), -log_power_r);
            case PhiFamily::General:
                if (!general_phi) throw ConfigError("general phi family needs an expression");
                return general_phi->eval1(u);
        }
        return u;
    };

    for (std::size_t k = 0; k < n; ++k) {
        V[k] = cand.value(L, pts[k]);
        LV[k] = cand.apply_generator(L, pts[k]);
        phi0[k] = phi0_of(V[k]);
        if (!(phi0[k] > 0)) throw NumericalError("phi0(V) must be positive on the grid");
        ratio[k] = -LV[k] / phi0[k];
    }

    // Asymptotic level of the ratio over the outer annulus, extrapolated
    // by a least-squares fit against 1/V (exact for the quadratic
    // certificates, conservative otherwise).
    auto annulus = [&](std::size_t k) {
        double rx = std::fabs(pts[k][0]) / std::max(std::fabs(grid.x.lo), std::fabs(grid.x.hi));
        double rv = grid.kinetic() ? std::fabs(pts[k][1]) / std::max(std::fabs(grid.v->lo),
                                                                     std::fabs(grid.v->hi))
                                   : 0.0;
        return std::max(rx, rv) >= 1.0 - kAnnulusFraction;
    };
    double ann_min = std::numeric_limits<double>::infinity(), ann_max = -ann_min;
    double s1 = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!annulus(k)) continue;
        ann_min = std::min(ann_min, ratio[k]);
        ann_max = std::max(ann_max, ratio[k]);
        double u = 1.0 / V[k];
        s1 += 1;
        sx += u;
        sy += ratio[k];
        sxx += u * u;
        sxy += u * ratio[k];
    }
    double plateau = ann_min;
    double det = s1 * sxx - sx * sx;
    if (s1 >= 4 && std::fabs(det) > 1e-30) {
        double a_fit = (sxx * sy - sx * sxy) / det;
        // the asymptote may sit above every annulus sample; allow a few
        // spreads of extrapolation before distrusting the fit
        double spread = ann_max - ann_min;
        plateau = std::clamp(a_fit, ann_min, ann_max + 3.0 * spread + 1e-12 * std::fabs(ann_max));
    }
    double ratio_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) ratio_max = std::max(ratio_max, ratio[k]);
    if (plateau > 0 && plateau < 1e-6 * ratio_max) {
        std::ostringstream diag;
        diag << "drift level collapses at infinity (asymptotic level " << plateau
             << " against interior ratio scale " << ratio_max
             << "); the family cannot certify this candidate";
        throw NumericalError(diag.str());
    }
    if (!(plateau > 0)) {
        std::ostringstream diag;
        diag << "no positive drift level: ratio -LV/phi0(V) has annulus min " << ann_min
             << ", max " << ann_max << " (sign changes mean the candidate degenerates)";
        throw NumericalError(diag.str());
    }
    double target = 0.5 * plateau;

    // Smallest sublevel set {V <= theta} whose exterior keeps the ratio
    // above the target level.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return V[a] < V[b]; });
    std::vector<double> suffix_min(n + 1, std::numeric_limits<double>::infinity());
    for (std::size_t k = n; k-- > 0;)
        suffix_min[k] = std::min(suffix_min[k + 1], ratio[order[k]]);

    std::size_t cut = n;  // first sorted index outside C
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (suffix_min[k + 1] >= target) {
            cut = k + 1;
            break;
        }
    }
    if (cut >= n || !(suffix_min[cut] > 0) || V[order[cut - 1]] >= V[order[n - 1]]) {
        std::ostringstream diag;
        diag << "no sublevel set reaches drift level " << target << "; ratio profile: min "
             << suffix_min[0] << ", annulus [" << ann_min << ", " << ann_max << "]";
        throw NumericalError(diag.str());
    }
    double theta = V[order[cut - 1]];
    double level = suffix_min[cut];

    PhiSpec phi = [&] {
        switch (family) {
            case PhiFamily::Linear: return PhiSpec::linear(level);
            case PhiFamily::LogPower: return PhiSpec::log_power(level, log_power_r);
            case PhiFamily::General: return PhiSpec::general(*general_phi).scaled(level);
        }
        return PhiSpec::linear(level);
    }();

    double b = 0;
    for (std::size_t k = 0; k < cut; ++k) {
        std::size_t i = order[k];
        b = std::max(b, LV[i] + phi(V[i]));
    }

    FitResult res;
    res.level = level;
    res.theta = theta;
    res.plateau = plateau;
    res.certificate = verify_drift(L, cand, phi, b, DriftSet::sublevel(theta), grid);
    res.certificate.parameters["fitted_level"] = level;
    res.certificate.parameters["plateau"] = plateau;
    res.certificate.parameters["annulus_fraction"] = kAnnulusFraction;
    return res;
}

double h_a(const Potential& F, double a, std::span<const double> x) {
    if (a <= 0 || a >= 2) throw ConfigError("h_a requires a in (0, 2)");
    Vector g = F.grad(x);
    return 0.5 * F.laplacian(x) + (0.5 * a - 1.0) * g.squaredNorm();
}

}  // namespace ergo
