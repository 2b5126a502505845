#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ergo/gibbs.hpp"
#include "ergo/lyapunov.hpp"
#include "ergo/phi.hpp"

namespace ergo {

// --- Psi-Sobolev reference function ------------------------------------

// Piecewise function vanishing only at 1, quadratic below 2 and of
// u log u growth above:
//   Psi(u) = (u-1)^2                                   u <= 2
//          = 1 + (1-4 log 2)(u-2) + 4(u log u - u - 2 log 2 + 2)   u > 2
double psi_sobolev(double u);
// Branchwise second derivative: 2 for u <= 2, 4/u for u > 2.
double psi_sobolev_second(double u);

// --- monotone profiles with controlled inversion ------------------------

// Cached monotone table; every inversion in this module is bisection on a
// verified-monotone table at 1e-6 relative tolerance.
class MonotoneProfile {
public:
    MonotoneProfile(std::function<double(double)> fn, double lo, double hi, int n,
                    bool log_spaced, bool non_increasing);

    double operator()(double t) const { return fn_(t); }
    // Smallest argument where the profile passes the level (from above for
    // non-increasing profiles).
    double inverse(double level) const;

    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    std::function<double(double)> fn_;
    double lo_, hi_;
    bool log_spaced_;
    bool non_increasing_;
    std::vector<double> args_, vals_;
};

// --- psi from phi (Meyn-Tweedie rate) -----------------------------------

// psi(t) = 1 / (phi o H^{-1})(t) with H(t) = int_1^t du/phi(u).
// Throws NumericalError for t beyond sup H when phi grows too fast for H
// to diverge (the error names sup H).
class PsiProfile {
public:
    explicit PsiProfile(PhiSpec phi);

    double psi(double t) const;
    double h_of(double u) const;       // H_phi(u), u >= 1
    double h_inverse(double t) const;  // H^{-1}(t)
    double sup_h() const { return sup_h_; }
    bool h_diverges() const { return !std::isfinite(sup_h_); }

private:
    PhiSpec phi_;
    std::vector<double> us_, hs_;  // cached H on a geometric u-grid
    double sup_h_ = std::numeric_limits<double>::infinity();

    void extend(double t_needed);
};

// --- Lyapunov-Poincare constants ----------------------------------------

struct ClpResult {
    double lambda = 0;  // (b kappa_U - 1)_+
    double c_lp = 0;
    int case_used = 0;
};

// Explicit C_LP from a linear drift LV <= -2 alpha V + b 1_C and a local
// Poincare constant kappa_U on U:
//   case 1: 1/C_LP = alpha (1 - b mu(U^c) / (alpha mu(U))) / (1 + lambda)
//   case 2: 1/C_LP = alpha (1 - mu(U^c) / mu(U)) / (1 + lambda)
// Preconditions are checked and named on failure.
ClpResult clp(double alpha, double b, double kappa_u, double mu_u, int case_used);

struct CwResult {
    double lambda = 0;
    double c_w = 0;
    int case_used = 0;
};

// Weak variant from LV <= -2 phi(V) + b 1_C:
//   case 1: 1/C_w = (1 - b mu(U^c) / (R mu(U))) / (1 + lambda),  R = inf phi
//   case 2: 1/C_w = (1 - b mu(U^c) / (phi(b) mu(U))) / (1 + lambda)
CwResult cw(const PhiSpec& phi, double b, double kappa_u, double mu_u, int case_used);

// --- beta_W by definition ------------------------------------------------

// beta_W(s) = inf { u : int_{V > u phi(V)} V dmu <= s }, evaluated exactly
// on the quadrature grid by sorting nodes by V/phi(V).
class BetaWDef {
public:
    BetaWDef(const GibbsMeasure& m, const GeneratorSpec& L, const LyapunovCandidate& V,
             const PhiSpec& phi);

    double mass_above(double u) const;  // T(u)
    double beta_w(double s) const;
    double total_v_mass() const { return total_; }
    double tail_floor() const { return tail_floor_; }

private:
    std::vector<double> ratio_;   // V/phi(V), descending
    std::vector<double> prefix_;  // cumulative V-mass of the top-k nodes
    double total_ = 0;
    double tail_floor_ = 0;
};

// Closed form of the weak-Lyapunov-Poincare beta for V = e^{aF} with
// int e^{-pF} dnu = c_p and a non-increasing eta:
//   beta_W(s) = 2 / (a eta( log(c_p/s) / (2-a-p) )).
double beta_w_closed(double a, double p, double c_p, const std::function<double(double)>& eta,
                     double s);

// --- xi and the induced weak-Poincare beta -------------------------------

enum class XiConvention { T, TwoT };  // compare -C_w beta_W(r) log r to t or 2t

class XiProfile {
public:
    XiProfile(std::function<double(double)> beta_w, double c_w,
              XiConvention conv = XiConvention::T, double r_min = 1e-13);

    // xi(t) = 2 inf { r > 0 : -C_w beta_W(r) log r <= t (or 2t) }
    double xi(double t) const;
    // Largest t the r_min window can resolve.
    double max_resolvable_t() const;
    XiConvention convention() const { return conv_; }

private:
    std::function<double(double)> beta_w_;
    double c_w_;
    XiConvention conv_;
    double r_min_ = 1e-13;

    double g(double r) const;
};

// Weak-Poincare beta from the decay profile:
//   beta(s) = s inf_{u>0} xi^{-1}(u e^{1 - u/s}),
//   xi^{-1}(a) = inf { b > 0 : xi(b) <= a }.
double weak_beta(const XiProfile& xi, double s, double t_max = 1e6);

// --- truncation bound and interpolation envelopes ------------------------

// inf_K [ 2 xi K^2 + 8 M K^{-2p/q} ] with q = p/(p-1), in closed form.
double lp_truncation_bound(double xi_t, double moment_2p, double p);

struct EnvelopeBound {
    std::string formula;
    double value = 0;
    bool is_explicit = false;  // ENVELOPE bounds carry front constant 1
};

// C_beta psi^beta(t) (int |f| V dmu)^beta (int |f|^{(2-beta)/(1-beta)} dmu)^{1-beta}
EnvelopeBound mt_variance_envelope(double psi_t, double beta, double mom_fv, double mom_q);
// beta = 1 variant: C (int V dmu) ||f||_inf^2 psi(t)
EnvelopeBound mt_variance_envelope_sup(double psi_t, double int_v, double sup_f);

// Entropy flavor of the same interpolation.
EnvelopeBound mt_entropy_envelope(double psi_t, double beta, double mom_hv, double mom_log);
EnvelopeBound mt_entropy_envelope_sup(double psi_t, double int_v, double sup_h);

inline double mt_moment_exponent(double beta) { return (2.0 - beta) / (1.0 - beta); }

}  // namespace ergo
