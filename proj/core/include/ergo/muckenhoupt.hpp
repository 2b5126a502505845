#pragma once

#include <vector>

#include "ergo/gibbs.hpp"

namespace ergo {

struct MuckenhouptReport {
    double b_plus = 0;
    double b_minus = 0;
    double b = 0;          // max(b_plus, b_minus), generator-time units
    double lower = 0;      // bracket [b, 4b] for C_P = 1/lambda1
    double upper = 0;
    double median = 0;
};

// Two-sided Muckenhoupt bracket for the 1D Poincare constant, reported in
// the same units as spectral_gap's C_P = 1/lambda1 (the generator carries
// the 1/2 Laplacian, so the classical integral criterion is doubled; the
// bracket B <= C_P <= 4B is unchanged by the common rescale).
MuckenhouptReport muckenhoupt(const GibbsMeasure& m);
MuckenhouptReport muckenhoupt(const GibbsMeasure& m, double median);

struct DivergenceReport {
    bool diverges = false;        // "no Poincare" flag
    std::vector<double> radii;
    std::vector<double> b_values; // B at each box radius
};

// Grows the box three times; the measure is flagged "no Poincare" when B
// grows by more than 1.5x at every doubling.
DivergenceReport muckenhoupt_divergence(const Potential& pot, double box_radius, int n);

}  // namespace ergo
