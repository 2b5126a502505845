#pragma once

#include <string>

#include "ergo/lyapunov.hpp"

namespace ergo {

// Feasibility system for the kinetic exponential Lyapunov candidate
// V = e^{Lambda_{a,b} - inf Lambda}. With the drift constant c, the
// gradient-bound constant kappa and the position dimension d, a pair
// (a, b) works when
//   kappa (b/2 + 4a) < c/4
//   a d + kappa b (b/2 + 4a) < c b / 2
//   c b / (8d) < a < c b / (4d)
//   b <= 1/8,  a <= 1/2.
struct KineticFeasibility {
    bool feasible = false;
    double a = 0, b = 0;       // chosen point (maximal b, a = 3cb/16d)
    double b_max = 0;
    std::string binding;       // failed constraint when infeasible
    double c = 0, kappa = 0;
    int d = 1;

    bool satisfies(double aa, double bb) const;
};

KineticFeasibility kinetic_param_search(double c, double kappa, int d);

// Grid estimates of the Theorem hypotheses for a concrete (F, G):
// liminf <grad G, grad F> over the outer annulus (= 2c), the kappa bound
// and sup |G''|.
struct KineticConstantEstimates {
    double liminf_inner = 0;  // min over the outer annulus of <grad G, grad F>
    double kappa = 0;         // max |grad G|^2 / (1 + |<grad F, grad G>|)
    double hess_sup = 0;      // sup |G''|
};

KineticConstantEstimates estimate_kinetic_constants(const Potential& F, const Potential& G,
                                                    const Grid1D& xgrid);

struct KineticSearchResult {
    KineticFeasibility feasibility;
    FitResult fit;  // Linear-phi certificate of V = e^{Lambda - inf Lambda}
    double shift;   // inf Lambda over the grid
};

// Runs the parameter search and certifies the resulting candidate on the
// (x, v) box with a fitted linear drift.
KineticSearchResult kinetic_search_and_verify(const Potential& F, const Potential& G, double c,
                                              double kappa, const VerifyGrid& grid);

// Entropy Lyapunov check for V = Lambda_{a,b} + M with G = F^{1-alpha}:
// evaluates the sufficient inequality
//   ((2-eta)a - 2 b eta - b(1-alpha)|F''|/F^alpha) v^2
//     + b (F'^2/F^alpha)(1 - alpha - 2 eta / F^alpha)
//     - (M + a d + 2 a eta F + b eta F^{1-alpha})  >=  0
// on the outer annulus, checks the growth conditions
//   c F^{1+alpha} <= |F'|^2 <= C F^{1+2alpha},  |F''|/F^alpha bounded,
// and certifies LV <= -eta V + b_drift 1_C directly.
struct EntropyLyapunovResult {
    bool conditions_hold = false;   // growth conditions (1) and (2)
    bool inequality_holds = false;  // sufficient inequality on the annulus
    double condition_lower = 0;     // min F'^2 / F^{1+alpha} on the annulus
    double condition_upper = 0;     // max F'^2 / F^{1+2alpha} on the annulus
    double hess_ratio = 0;          // max |F''| / F^alpha on the annulus
    double lower_trend = 0;         // edge/inner ratio of F'^2 / F^{1+alpha}
    double M = 0;
    DriftCertificate certificate;
};

EntropyLyapunovResult entropy_lyapunov(const Potential& F, double alpha, double a, double b,
                                       double M, double eta, const VerifyGrid& grid);

}  // namespace ergo
