#pragma once

#include <vector>

#include "ergo/generator.hpp"
#include "ergo/gibbs.hpp"

namespace ergo {

// Finite-volume discretization of the 1D overdamped generator
// L = 1/2 d^2/dx^2 - F' d/dx on [-R, R] with zero-flux (Neumann) closure.
//
// Built from the Dirichlet form E(f) = 1/2 int f'^2 dmu: with lumped node
// weights w_i and geometric-mean edge weights, A = -W^{-1} K. This gives
// row sums 0, nonnegative off-diagonal entries and exact self-adjointness
// in the weighted inner product by construction.
class DiscretizedGenerator {
public:
    DiscretizedGenerator(const Potential& pot, double box_radius, int n);

    int size() const { return n_; }
    const Grid1D& grid() const { return grid_; }
    // Normalized measure weights per node (lumped trapezoid).
    const std::vector<double>& weights() const { return weights_; }
    double node(int i) const { return grid_.node(i); }

    // Tridiagonal action y = A f.
    void apply(const std::vector<double>& f, std::vector<double>& out) const;

    double diag(int i) const;
    double offdiag(int i) const;  // A_{i,i+1}
    double subdiag(int i) const;  // A_{i,i-1}

    // Arrays of the similarity-transformed symmetric matrix
    // T = W^{1/2} (-A) W^{-1/2} (PSD, tridiagonal).
    void symmetrized(std::vector<double>& diag, std::vector<double>& off) const;

    double max_abs_row_sum() const;
    double symmetry_defect() const;  // max |(WA - A^T W)_{ij}|

private:
    int n_;
    Grid1D grid_;
    std::vector<double> weights_;  // w_i, sum = 1
    std::vector<double> cond_;     // edge conductances k_{i+1/2} of E
};

struct SpectralReport {
    double lambda1 = 0.0;        // smallest nonzero eigenvalue of -A
    double c_p = 0.0;            // 1 / lambda1, the generator-time Poincare constant
    double lambda1_refined = 0;  // value at twice the resolution
    double richardson_error = 0; // |fine - coarse| / 3
    bool no_gap = false;         // lambda1 below detection threshold
    int n = 0;
    double box_radius = 0;
};

// lambda1 by Sturm-sequence bisection on the symmetrized tridiagonal
// matrix, plus a one-step grid refinement estimate.
SpectralReport spectral_gap(const DiscretizedGenerator& d);
SpectralReport spectral_gap(const Potential& pot, double box_radius, int n);

// Smallest nonzero eigenvalue of the given discretization only.
double lambda1_of(const DiscretizedGenerator& d);

}  // namespace ergo
