#include "ergo/kinetic.hpp"

#include <algorithm>
#include <cmath>

#include "ergo/errors.hpp"

namespace ergo {

bool KineticFeasibility::satisfies(double aa, double bb) const {
    if (!(bb > 0) || bb > 0.125 + 1e-15) return false;
    if (!(aa > 0) || aa > 0.5 + 1e-15) return false;
    if (!(kappa * (bb / 2 + 4 * aa) < c / 4)) return false;
    if (!(aa * d + kappa * bb * (bb / 2 + 4 * aa) < c * bb / 2)) return false;
    if (!(c * bb / (8 * d) < aa && aa < c * bb / (4 * d))) return false;
    return true;
}

namespace {

// For fixed b, the admissible a-interval (lo, hi); empty when hi <= lo.
std::pair<double, double> a_interval(double c, double kappa, int d, double b) {
    double lo = c * b / (8.0 * d);
    double hi = c * b / (4.0 * d);
    hi = std::min(hi, 0.5);
    hi = std::min(hi, (c / (4.0 * kappa) - b / 2.0) / 4.0);
    hi = std::min(hi, (c * b / 2.0 - kappa * b * b / 2.0) / (d + 4.0 * kappa * b));
    return {lo, hi};
}

}  // namespace

KineticFeasibility kinetic_param_search(double c, double kappa, int d) {
    KineticFeasibility out;
    out.c = c;
    out.kappa = kappa;
    out.d = d;
    if (!(c > 0)) {
        out.binding = "liminf <grad G, grad F> = 2c > 0 fails (c <= 0)";
        return out;
    }
    if (!(kappa > 0) || d < 1) {
        out.binding = "kappa > 0 and d >= 1 required";
        return out;
    }

    auto feasible_b = [&](double b) {
        auto [lo, hi] = a_interval(c, kappa, d, b);
        return hi > lo && lo > 0;
    };

    // b_max by bisection on (0, 1/8].
    double b_hi = 0.125;
    if (feasible_b(b_hi)) {
        out.b_max = b_hi;
    } else {
        double lo = 0, hi = b_hi;
        // find any feasible point first
        double probe = b_hi / 2;
        bool found = false;
        for (int k = 0; k < 40 && !found; ++k, probe /= 2) found = feasible_b(probe);
        if (!found) {
            auto [alo, ahi] = a_interval(c, kappa, d, b_hi / 2);
            out.binding = ahi <= alo ? "kappa(b/2+4a) < c/4 or ad + kappa b(b/2+4a) < cb/2 "
                                       "leaves no a in (cb/8d, cb/4d)"
                                     : "no feasible b in (0, 1/8]";
            return out;
        }
        lo = probe * 2;
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo + hi);
            if (feasible_b(mid)) lo = mid;
            else hi = mid;
        }
        out.b_max = lo;
    }

    out.b = out.b_max;
    auto [lo, hi] = a_interval(c, kappa, d, out.b);
    double a_mid = 3.0 * c * out.b / (16.0 * d);  // midpoint of (cb/8d, cb/4d)
    out.a = std::clamp(a_mid, lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
    // Shrink b until the chosen point satisfies every inequality strictly.
    for (int guard = 0; guard < 60 && !out.satisfies(out.a, out.b); ++guard) {
        out.b *= 0.95;
        auto iv = a_interval(c, kappa, d, out.b);
        a_mid = 3.0 * c * out.b / (16.0 * d);
        out.a = std::clamp(a_mid, iv.first + 0.05 * (iv.second - iv.first),
                           iv.second - 0.05 * (iv.second - iv.first));
    }
    out.feasible = out.satisfies(out.a, out.b);
    if (!out.feasible) out.binding = "chosen point failed strict verification";
    return out;
}

KineticConstantEstimates estimate_kinetic_constants(const Potential& F, const Potential& G,
                                                    const Grid1D& xgrid) {
    KineticConstantEstimates est;
    est.liminf_inner = std::numeric_limits<double>::infinity();
    double edge = std::max(std::fabs(xgrid.lo), std::fabs(xgrid.hi));
    for (int i = 0; i < xgrid.n; ++i) {
        double x = xgrid.node(i);
        double dF = F.grad({&x, 1})(0);
        double dG = G.grad({&x, 1})(0);
        double d2G = G.hessian({&x, 1})(0, 0);
        double inner = dF * dG;
        est.kappa = std::max(est.kappa, dG * dG / (1.0 + std::fabs(inner)));
        est.hess_sup = std::max(est.hess_sup, std::fabs(d2G));
        if (std::fabs(x) >= (1.0 - kAnnulusFraction) * edge)
            est.liminf_inner = std::min(est.liminf_inner, inner);
    }
    return est;
}

KineticSearchResult kinetic_search_and_verify(const Potential& F, const Potential& G, double c,
                                              double kappa, const VerifyGrid& grid) {
    if (!grid.kinetic()) throw ConfigError("kinetic search needs an (x, v) grid");
    KineticSearchResult res;
    res.feasibility = kinetic_param_search(c, kappa, 1);
    if (!res.feasibility.feasible)
        throw NumericalError("kinetic parameter search: empty feasible region (" +
                             res.feasibility.binding + ")");

    // inf Lambda over the grid fixes the normalization V >= 1.
    GeneratorSpec L = GeneratorSpec::kinetic(F);
    auto unshifted = LyapunovCandidate::kinetic_exp(res.feasibility.a, res.feasibility.b, G, 0.0);
    double inf_lambda = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.x.n; ++i) {
        for (int j = 0; j < grid.v->n; ++j) {
            double pt[2] = {grid.x.node(i), grid.v->node(j)};
            inf_lambda = std::min(inf_lambda, std::log(unshifted.value(L, pt)));
        }
    }
    res.shift = inf_lambda;
    auto cand =
        LyapunovCandidate::kinetic_exp(res.feasibility.a, res.feasibility.b, G, inf_lambda);
    res.fit = fit_drift_params(L, cand, PhiFamily::Linear, grid);
    res.fit.certificate.parameters["a"] = res.feasibility.a;
    res.fit.certificate.parameters["b_lambda"] = res.feasibility.b;
    res.fit.certificate.parameters["c"] = c;
    res.fit.certificate.parameters["kappa"] = kappa;
    return res;
}

EntropyLyapunovResult entropy_lyapunov(const Potential& F, double alpha, double a, double b,
                                       double M, double eta, const VerifyGrid& grid) {
    if (!grid.kinetic()) throw ConfigError("entropy_lyapunov needs an (x, v) grid");
    if (alpha < 0 || alpha >= 1) throw ConfigError("alpha must lie in [0, 1)");
    if (eta <= 0 || a <= 0 || b <= 0) throw ConfigError("a, b, eta must be positive");

    EntropyLyapunovResult res;
    GeneratorSpec L = GeneratorSpec::kinetic(F);

    // Growth conditions on the outer annulus of the x-grid.
    double edge = std::max(std::fabs(grid.x.lo), std::fabs(grid.x.hi));
    double cmin = std::numeric_limits<double>::infinity();
    double cmax = 0, hess_ratio = 0;
    for (int i = 0; i < grid.x.n; ++i) {
        double x = grid.x.node(i);
        double ax = std::fabs(x);
        if (ax < (1.0 - kAnnulusFraction) * edge) continue;
        double Fv = F.value({&x, 1});
        if (Fv <= 0) throw NumericalError("entropy Lyapunov needs F > 0 on the annulus");
        double dF = F.grad({&x, 1})(0);
        double d2F = F.hessian({&x, 1})(0, 0);
        double low = dF * dF / std::pow(Fv, 1.0 + alpha);
        double up = dF * dF / std::pow(Fv, 1.0 + 2.0 * alpha);
        cmin = std::min(cmin, low);
        cmax = std::max(cmax, up);
        hess_ratio = std::max(hess_ratio, std::fabs(d2F) / std::pow(Fv, alpha));
    }
    res.condition_lower = cmin;
    res.condition_upper = cmax;
    res.hess_ratio = hess_ratio;
    // Condition (1)'s lower bound must not decay with |x|: compare the
    // ratio at the edge against R/4 (a wide enough baseline to expose a
    // power-law decline).
    auto low_at = [&](double x) {
        double Fv = F.value({&x, 1});
        double dF = F.grad({&x, 1})(0);
        return dF * dF / std::pow(Fv, 1.0 + alpha);
    };
    double inner = low_at(edge / 4.0);
    res.lower_trend = inner > 0 ? low_at(edge) / inner : 0;
    res.conditions_hold = cmin > 0 && res.lower_trend > 0.75 && std::isfinite(hess_ratio);

    if (M < 0) {
        // M large enough for positivity: max(0, -inf Lambda) + 1.
        auto lam = LyapunovCandidate::kinetic_affine_from_alpha(a, b, alpha, 0.0);
        double inf_lambda = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid.x.n; ++i)
            for (int j = 0; j < grid.v->n; ++j) {
                double pt[2] = {grid.x.node(i), grid.v->node(j)};
                inf_lambda = std::min(inf_lambda, lam.value(L, pt));
            }
        M = std::max(0.0, -inf_lambda) + 1.0;
    }
    res.M = M;

    // Sufficient inequality on the annulus (x large, all v on the grid).
    res.inequality_holds = true;
    for (int i = 0; i < grid.x.n && res.inequality_holds; ++i) {
        double x = grid.x.node(i);
        if (std::fabs(x) < (1.0 - kAnnulusFraction) * edge) continue;
        double Fv = F.value({&x, 1});
        double dF = F.grad({&x, 1})(0);
        double d2F = F.hessian({&x, 1})(0, 0);
        double fa = std::pow(Fv, alpha);
        for (int j = 0; j < grid.v->n; ++j) {
            double v = grid.v->node(j);
            double lhs = ((2.0 - eta) * a - 2.0 * b * eta - b * (1.0 - alpha) * std::fabs(d2F) / fa) *
                             v * v +
                         b * (dF * dF / fa) * (1.0 - alpha - 2.0 * eta / fa) -
                         (M + a * 1.0 + 2.0 * a * eta * Fv + b * eta * std::pow(Fv, 1.0 - alpha));
            if (lhs < 0) {
                res.inequality_holds = false;
                break;
            }
        }
    }

    // Direct drift check LV <= -eta V + b_drift 1_C with a fitted sublevel
    // set: b_drift = max over C of LV + eta V.
    auto cand = LyapunovCandidate::kinetic_affine_from_alpha(a, b, alpha, M);
    PhiSpec phi = PhiSpec::linear(eta);
    // choose the smallest sublevel whose exterior margin is nonnegative
    double theta_best = -1;
    double vmax = 0;
    std::vector<std::pair<double, double>> vs;  // (V, LV + eta V)
    for (int i = 0; i < grid.x.n; ++i)
        for (int j = 0; j < grid.v->n; ++j) {
            double pt[2] = {grid.x.node(i), grid.v->node(j)};
            double V = cand.value(L, pt);
            double LV = cand.apply_generator(L, pt);
            vs.emplace_back(V, LV + eta * V);
            vmax = std::max(vmax, V);
        }
    std::sort(vs.begin(), vs.end());
    std::vector<double> suffix(vs.size() + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t k = vs.size(); k-- > 0;) suffix[k] = std::max(suffix[k + 1], vs[k].second);
    for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
        if (suffix[k + 1] <= 0) {
            theta_best = vs[k].first;
            break;
        }
    }
    if (theta_best < 0 || theta_best >= vmax) {
        res.certificate.valid = false;
        res.certificate.candidate = cand.describe();
        res.certificate.phi = phi.describe();
        res.certificate.grid_spec = "no admissible sublevel set";
        return res;
    }
    double b_drift = 0;
    for (auto& [V, m] : vs)
        if (V <= theta_best) b_drift = std::max(b_drift, m);
    res.certificate =
        verify_drift(L, cand, phi, b_drift, DriftSet::sublevel(theta_best), grid);
    res.certificate.parameters["alpha"] = alpha;
    res.certificate.parameters["a"] = a;
    res.certificate.parameters["b_lambda"] = b;
    res.certificate.parameters["M"] = M;
    res.certificate.parameters["eta"] = eta;
    return res;
}

}  // namespace ergo
