#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ergo {

// Time series of decay functionals from the deterministic semigroup
// oracle. CSV schema: t, variance, weighted_variance, entropy, tv,
// psi_functional (17 significant digits, header row mandatory).
struct SemigroupTrace {
    std::vector<double> times;
    std::vector<double> variance;
    std::vector<double> weighted_variance;
    std::vector<double> entropy;
    std::vector<double> tv;
    std::vector<double> psi_functional;
    std::vector<double> mass;  // conservation diagnostic, not part of the CSV schema
    std::vector<std::string> metadata;

    void write_csv(std::ostream& os) const;
};

// Monte Carlo decay functional with batch-means standard errors.
// CSV schema: t, value, stderr.
struct McTrace {
    std::string kind;
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> stderrs;
    std::vector<std::string> metadata;  // '#'-prefixed lines (rng, seed, ...)

    void write_csv(std::ostream& os) const;
};

struct ExpFit {
    double rate = 0;       // decay rate rho in y ~ c e^{-rho t}
    double intercept = 0;  // log c
    double r2 = 0;
    double window_lo = 0;  // fitted time window
    double window_hi = 0;
    int points = 0;
};

// Weighted least squares of log(values) against t over the window where
// the functional lies in [1e-8, 1e-2] * initial (skips transients and the
// noise floor). Weights are 1/SE^2 when standard errors are given.
ExpFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                       const std::vector<double>* stderrs = nullptr,
                       double win_hi_frac = 1e-2, double win_lo_frac = 1e-8);

std::string format_sig17(double v);

}  // namespace ergo
