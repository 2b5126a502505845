#include "ergo/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo {

double psi_sobolev(double u) {
    if (u < 0) throw ConfigError("Psi is defined on u >= 0");
    if (u <= 2.0) {
        double d = u - 1.0;
        return d * d;
    }
    const double log2 = std::log(2.0);
    return 1.0 + (1.0 - 4.0 * log2) * (u - 2.0) +
           4.0 * (u * std::log(u) - u - 2.0 * log2 + 2.0);
}

double psi_sobolev_second(double u) {
    if (u < 0) throw ConfigError("Psi is defined on u >= 0");
    return u <= 2.0 ? 2.0 : 4.0 / u;
}

MonotoneProfile::MonotoneProfile(std::function<double(double)> fn, double lo, double hi, int n,
                                 bool log_spaced, bool non_increasing)
    : fn_(std::move(fn)), lo_(lo), hi_(hi), log_spaced_(log_spaced),
      non_increasing_(non_increasing) {
    if (n < 8) throw ConfigError("monotone profile needs at least 8 samples");
    if (log_spaced && (lo <= 0 || hi <= lo)) throw ConfigError("bad log-spaced profile domain");
    args_.resize(static_cast<std::size_t>(n));
    vals_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / (n - 1);
        double a = log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
        args_[static_cast<std::size_t>(i)] = a;
        vals_[static_cast<std::size_t>(i)] = fn_(a);
    }
    for (int i = 1; i < n; ++i) {
        double prev = vals_[static_cast<std::size_t>(i - 1)];
        double cur = vals_[static_cast<std::size_t>(i)];
        double slack = 1e-12 * std::max(std::fabs(prev), std::fabs(cur));
        bool ok = non_increasing ? cur <= prev + slack : cur >= prev - slack;
        if (!ok)
            throw NumericalError("profile failed monotonicity verification near argument " +
                                 std::to_string(args_[static_cast<std::size_t>(i)]));
    }
}

double MonotoneProfile::inverse(double level) const {
    if (!non_increasing_) throw ConfigError("inverse implemented for non-increasing profiles");
    if (vals_.front() <= level) return lo_;
    if (vals_.back() > level)
        throw NumericalError("inversion level below the profile range");
    std::size_t lo = 0, hi = vals_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (vals_[mid] <= level) hi = mid;
        else lo = mid;
    }
    // refine by bisection on the true function to 1e-6 relative
    double a = args_[lo], b = args_[hi];
    for (int it = 0; it < 80 && (b - a) > 1e-6 * std::max(1e-300, std::fabs(b)); ++it) {
        double mid = 0.5 * (a + b);
        if (fn_(mid) <= level) b = mid;
        else a = mid;
    }
    return b;
}

PsiProfile::PsiProfile(PhiSpec phi) : phi_(std::move(phi)) {
    us_.push_back(1.0);
    hs_.push_back(0.0);
    extend(1.0);
}

namespace {

// Composite Simpson on [a, b] with m subintervals (m even).
double simpson(const std::function<double(double)>& f, double a, double b, int m) {
    double h = (b - a) / m;
    double s = f(a) + f(b);
    for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

void PsiProfile::extend(double t_needed) {
    if (!std::isfinite(sup_h_)) { /* keep extending below */ }
    auto integrand = [&](double u) { return 1.0 / phi_(u); };
    const double ratio = 1.05;
    int stall = 0;
    while (hs_.back() < t_needed * 1.1 + 1.0) {
        double u0 = us_.back();
        double u1 = u0 * ratio;
        double dh = simpson(integrand, u0, u1, 16);
        us_.push_back(u1);
        hs_.push_back(hs_.back() + dh);
        if (dh < 1e-15 * std::max(1.0, hs_.back())) ++stall;
        else stall = 0;
        if (stall > 64 || u1 > 1e300) {
            sup_h_ = hs_.back();
            return;
        }
    }
}

double PsiProfile::h_of(double u) const {
    if (u < 1.0) throw ConfigError("H_phi is defined on [1, inf)");
    auto it = std::lower_bound(us_.begin(), us_.end(), u);
    std::size_t i = it == us_.begin() ? 0 : static_cast<std::size_t>(it - us_.begin()) - 1;
    if (i + 1 >= us_.size()) i = us_.size() - 2;
    auto integrand = [&](double v) { return 1.0 / phi_(v); };
    return hs_[i] + simpson(integrand, us_[i], u, 16);
}

double PsiProfile::h_inverse(double t) const {
    if (t < 0) throw ConfigError("H^{-1} needs t >= 0");
    auto* self = const_cast<PsiProfile*>(this);
    self->extend(t);
    if (std::isfinite(sup_h_) && t >= sup_h_)
        throw NumericalError("psi undefined beyond sup H_phi = " + std::to_string(sup_h_) +
                             " (phi grows too fast; H_phi is bounded)");
    auto it = std::lower_bound(hs_.begin(), hs_.end(), t);
    if (it == hs_.begin()) return 1.0;
    std::size_t i = static_cast<std::size_t>(it - hs_.begin());
    double ulo = us_[i - 1], uhi = us_[std::min(i, us_.size() - 1)];
    auto integrand = [&](double v) { return 1.0 / phi_(v); };
    double hlo = hs_[i - 1];
    for (int k = 0; k < 80 && (uhi - ulo) > 1e-12 * uhi; ++k) {
        double mid = 0.5 * (ulo + uhi);
        double hm = hlo + simpson(integrand, us_[i - 1], mid, 16);
        if (hm <= t) ulo = mid;
        else uhi = mid;
    }
    return 0.5 * (ulo + uhi);
}

double PsiProfile::psi(double t) const { return 1.0 / phi_(h_inverse(t)); }

ClpResult clp(double alpha, double b, double kappa_u, double mu_u, int case_used) {
    if (alpha <= 0 || b < 0) throw ConfigError("clp needs alpha > 0, b >= 0");
    if (mu_u <= 0 || mu_u > 1) throw ConfigError("clp needs mu(U) in (0, 1]");
    double mu_uc = 1.0 - mu_u;
    ClpResult res;
    res.case_used = case_used;
    res.lambda = std::max(b * kappa_u - 1.0, 0.0);
    double inv;
    if (case_used == 1) {
        if (!(alpha * mu_u > b * mu_uc))
            throw ConfigError("clp case 1 precondition failed: alpha mu(U) > b mu(U^c) "
                              "does not hold");
        inv = alpha * (1.0 - b * mu_uc / (alpha * mu_u)) / (1.0 + res.lambda);
    } else if (case_used == 2) {
        if (!(mu_u > mu_uc))
            throw ConfigError("clp case 2 precondition failed: mu(U) > mu(U^c) does not hold");
        inv = alpha * (1.0 - mu_uc / mu_u) / (1.0 + res.lambda);
    } else {
        throw ConfigError("clp case must be 1 or 2");
    }
    res.c_lp = 1.0 / inv;
    return res;
}

CwResult cw(const PhiSpec& phi, double b, double kappa_u, double mu_u, int case_used) {
    if (b < 0) throw ConfigError("cw needs b >= 0");
    if (mu_u <= 0 || mu_u > 1) throw ConfigError("cw needs mu(U) in (0, 1]");
    double mu_uc = 1.0 - mu_u;
    CwResult res;
    res.case_used = case_used;
    res.lambda = std::max(b * kappa_u - 1.0, 0.0);
    double inv;
    if (case_used == 1) {
        double R = phi.lower_bound();
        if (!(R > 0))
            throw ConfigError("cw case 1 needs R = inf phi > 0");
        if (!(R * mu_u > b * mu_uc))
            throw ConfigError("cw case 1 precondition failed: R mu(U) > b mu(U^c) does not hold");
        inv = (1.0 - b * mu_uc / (R * mu_u)) / (1.0 + res.lambda);
    } else if (case_used == 2) {
        if (!phi.increasing())
            throw ConfigError("cw case 2 needs phi increasing (flag not verified)");
        double pb = phi(b);
        if (!(pb * mu_u > b * mu_uc))
            throw ConfigError(
                "cw case 2 precondition failed: phi(b) mu(U) > b mu(U^c) does not hold");
        inv = (1.0 - b * mu_uc / (pb * mu_u)) / (1.0 + res.lambda);
    } else {
        throw ConfigError("cw case must be 1 or 2");
    }
    res.c_w = 1.0 / inv;
    return res;
}

BetaWDef::BetaWDef(const GibbsMeasure& m, const GeneratorSpec& L, const LyapunovCandidate& V,
                   const PhiSpec& phi) {
    int n = m.grid_nodes();
    std::vector<std::pair<double, double>> items;  // (ratio, V mass)
    items.reserve(static_cast<std::size_t>(n));
    double vmax_edge = 0;
    for (int i = 0; i < n; ++i) {
        double x = m.node(i);
        double v = V.value(L, {&x, 1});
        double p = phi(v);
        if (!(p > 0)) throw NumericalError("phi(V) must stay positive for beta_W");
        double mass = v * m.weights()[static_cast<std::size_t>(i)];
        items.emplace_back(v / p, mass);
        total_ += mass;
        if (i == 0 || i == n - 1) vmax_edge = std::max(vmax_edge, v * m.density(x));
    }
    // Reported truncation floor: edge integrand times the box radius plus
    // the measure's own tail estimate.
    tail_floor_ = vmax_edge * m.box_radius() + m.tail_fraction();

    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    ratio_.resize(items.size());
    prefix_.resize(items.size() + 1);
    prefix_[0] = 0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        ratio_[k] = items[k].first;
        prefix_[k + 1] = prefix_[k] + items[k].second;
    }
}

double BetaWDef::mass_above(double u) const {
    // number of nodes with ratio > u
    auto it = std::lower_bound(ratio_.begin(), ratio_.end(), u,
                               [](double r, double uu) { return r > uu; });
    std::size_t k = static_cast<std::size_t>(it - ratio_.begin());
    return prefix_[k];
}

double BetaWDef::beta_w(double s) const {
    if (s <= 10.0 * tail_floor_)
        throw NumericalError("beta_w truncation-limited: s = " + std::to_string(s) +
                             " at or below the tail floor " + std::to_string(tail_floor_));
    if (s >= total_) return 0.0;  // boundary: the whole V-mass fits
    // largest k with prefix_[k] <= s; answer is the next ratio value
    std::size_t lo = 0, hi = prefix_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (prefix_[mid] <= s) lo = mid;
        else hi = mid;
    }
    return ratio_[lo];
}

double beta_w_closed(double a, double p, double c_p, const std::function<double(double)>& eta,
                     double s) {
    if (!(a > 0 && a < 2.0 - p)) throw ConfigError("beta_w_closed needs 0 < a < 2 - p");
    if (!(c_p > 0)) throw ConfigError("beta_w_closed needs c_p > 0");
    if (s >= c_p)
        throw ConfigError("beta_w_closed needs s < c_p (log(c_p/s) must be positive)");
    double arg = std::log(c_p / s) / (2.0 - a - p);
    double e = eta(arg);
    if (!(e > 0)) throw NumericalError("eta must be positive at " + std::to_string(arg));
    return 2.0 / (a * e);
}

XiProfile::XiProfile(std::function<double(double)> beta_w, double c_w, XiConvention conv,
                     double r_min)
    : beta_w_(std::move(beta_w)), c_w_(c_w), conv_(conv), r_min_(r_min) {
    if (c_w <= 0) throw ConfigError("xi needs C_w > 0");
    if (r_min <= 0 || r_min >= 1) throw ConfigError("xi needs r_min in (0, 1)");
}

double XiProfile::g(double r) const { return -c_w_ * beta_w_(r) * std::log(r); }

double XiProfile::max_resolvable_t() const {
    double t = g(r_min_) * (1.0 - 1e-9);
    return conv_ == XiConvention::T ? t : 0.5 * t;
}

double XiProfile::xi(double t) const {
    if (t <= 0) throw ConfigError("xi needs t > 0");
    double threshold = conv_ == XiConvention::T ? t : 2.0 * t;
    // g decreasing in r on (0, 1); the inf is the smallest r with
    // g(r) <= threshold.
    double hi = 1.0 - 1e-12;
    if (g(hi) > threshold) return 2.0;  // inf sits at the right edge
    if (g(r_min_) >= threshold) {
        double lo = r_min_;
        for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-9; ++it) {
            double mid = std::sqrt(lo * hi);
            if (g(mid) <= threshold) hi = mid;
            else lo = mid;
        }
        return 2.0 * hi;
    }
    // t reaches beyond the resolvable window: the caller's beta_w floor
    // (through r_min) caps how small r may get.
    throw NumericalError("xi: t = " + std::to_string(t) +
                         " beyond the resolvable window (g(r_min) < threshold; raise the "
                         "beta_w grid or lower t)");
}

double weak_beta(const XiProfile& xi, double s, double t_max) {
    if (s <= 0) throw ConfigError("weak_beta needs s > 0");
    double t_cap = std::min(t_max, xi.max_resolvable_t());
    auto xi_inverse = [&](double a) -> double {
        // inf { b > 0 : xi(b) <= a }
        if (xi.xi(1e-12) <= a) return 0.0;
        if (xi.xi(t_cap) > a) return t_cap;  // censored beyond the window
        double lo = 1e-12, hi = t_cap;
        for (int it = 0; it < 200 && hi - lo > 1e-6 * std::max(1.0, hi); ++it) {
            double mid = 0.5 * (lo + hi);
            if (xi.xi(mid) <= a) hi = mid;
            else lo = mid;
        }
        return hi;
    };
    auto objective = [&](double log_u) -> double {
        double u = std::exp(log_u);
        double a = u * std::exp(1.0 - u / s);
        return xi_inverse(a);
    };

    double lo = std::log(1e-12 * s), hi = std::log(1e4 * s);
    for (int attempt = 0; attempt < 2; ++attempt) {
        // golden-section over log u
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = lo, b = hi;
        double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
        double f1 = objective(c1), f2 = objective(c2);
        for (int it = 0; it < 120; ++it) {
            if (f1 <= f2) {
                b = c2;
                c2 = c1;
                f2 = f1;
                c1 = b - gr * (b - a);
                f1 = objective(c1);
            } else {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + gr * (b - a);
                f2 = objective(c2);
            }
        }
        double best = std::min(f1, f2);
        double arg = f1 <= f2 ? c1 : c2;
        bool at_edge = arg < lo + 0.05 * (hi - lo) || arg > hi - 0.05 * (hi - lo);
        if (!at_edge || attempt == 1) return s * best;
        lo -= 9.0;  // widen-and-retry once
        hi += 9.0;
    }
    throw NumericalError("weak_beta: optimization window exhausted");
}

double lp_truncation_bound(double xi_t, double moment_2p, double p) {
    if (p <= 1) throw ConfigError("lp_truncation_bound needs p > 1");
    if (xi_t < 0 || moment_2p < 0) throw ConfigError("xi and the moment must be nonnegative");
    if (xi_t == 0) return 0.0;
    double q = p / (p - 1.0);
    double r = 2.0 * p / q;  // = 2(p-1)
    double k_star = std::pow(2.0 * moment_2p * r / xi_t, 1.0 / (r + 2.0));
    return 2.0 * xi_t * k_star * k_star + 8.0 * moment_2p * std::pow(k_star, -r);
}

EnvelopeBound mt_variance_envelope(double psi_t, double beta, double mom_fv, double mom_q) {
    if (beta <= 0 || beta >= 1)
        throw ConfigError("interpolated variance envelope needs beta in (0, 1)");
    if (mom_fv < 0 || mom_q < 0) throw ConfigError("moments must be nonnegative");
    EnvelopeBound e;
    e.formula = "C_beta psi^beta (int |f| V dmu)^beta (int |f|^((2-b)/(1-b)) dmu)^(1-b)";
    e.value = std::pow(psi_t, beta) * std::pow(mom_fv, beta) * std::pow(mom_q, 1.0 - beta);
    e.is_explicit = false;  // C_beta is not explicit; set to 1
    return e;
}

EnvelopeBound mt_variance_envelope_sup(double psi_t, double int_v, double sup_f) {
    EnvelopeBound e;
    e.formula = "C (int V dmu) ||f||_inf^2 psi(t)";
    e.value = int_v * sup_f * sup_f * psi_t;
    e.is_explicit = false;
    return e;
}

EnvelopeBound mt_entropy_envelope(double psi_t, double beta, double mom_hv, double mom_log) {
    if (beta <= 0 || beta >= 1)
        throw ConfigError("interpolated entropy envelope needs beta in (0, 1)");
    if (mom_hv < 0 || mom_log < 0) throw ConfigError("moments must be nonnegative");
    EnvelopeBound e;
    e.formula = "C_beta psi^beta (int h V dmu)^beta (int |h-1| |log h|^(1/(1-b)) dmu)^(1-b)";
    e.value = std::pow(psi_t, beta) * std::pow(mom_hv, beta) * std::pow(mom_log, 1.0 - beta);
    e.is_explicit = false;
    return e;
}

EnvelopeBound mt_entropy_envelope_sup(double psi_t, double int_v, double sup_h) {
    EnvelopeBound e;
    e.formula = "C (int V dmu) ||h||_inf log ||h||_inf psi(t)";
    e.value = int_v * sup_h * std::log(sup_h) * psi_t;
    e.is_explicit = false;
    return e;
}

}  // namespace ergo
