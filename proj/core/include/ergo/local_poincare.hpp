#pragma once

#include "ergo/gibbs.hpp"

namespace ergo {

struct LocalPoincareReport {
    // Rigorous-style upper bound from the Neumann constant on U and the
    // log-bounded perturbation of Lebesgue by e^{-2F}.
    double bound = 0;
    // Numerical optimum: largest generalized Rayleigh quotient of the
    // U-restricted quadratic form against the full-space energy over
    // mean-zero grid functions.
    double numerical = 0;
    double mu_u = 0;       // mu(U)
    double u_radius = 0;
    bool converged = true;
    int iterations = 0;
};

// Local Poincare constant kappa_U on the centered interval U = [-u, u],
// energy taken over the whole box and measured in generator-time units
// E(f) = int (-Lf) f dmu = 1/2 int f'^2 dmu.
LocalPoincareReport local_poincare(const GibbsMeasure& m, double u_radius);

}  // namespace ergo
