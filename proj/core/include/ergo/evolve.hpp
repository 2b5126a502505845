#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "ergo/spectral.hpp"
#include "ergo/trace.hpp"

namespace ergo {

struct EvolveOptions {
    double dt = 0.0;              // 0: pick from the output grid resolution
    bool density_mode = true;     // density h (int h dmu = 1) vs mean-zero function
    bool adjoint = false;         // evolve by L* (only differs for kinetic)
    std::vector<double> weight;   // W >= 1 for the weighted functionals; empty = 1
};

// Crank-Nicolson evolution of the 1D semigroup on the grid, recording the
// decay functionals at each output time. Density mode conserves
// int h dmu exactly (the weighted matrix has zero column sums).
SemigroupTrace semigroup_evolve(const DiscretizedGenerator& d, std::vector<double> h0,
                                const std::vector<double>& t_grid, const EvolveOptions& opts);

// --- kinetic Fokker-Planck on the (x, v) tensor grid ------------------

struct KineticGrid {
    Grid1D x;
    Grid1D v;
    int index(int i, int j) const { return i * v.n + j; }  // x-major
};

// Discretization of the kinetic generator (or its L^2(mu) adjoint):
// mu_v-symmetric stiffness for 1/2 Delta_v - v d_v, first-order upwinding
// for the transport terms. Row sums vanish, so h = 1 is an exact fixed
// point; mass conservation is first-order in the mesh and reported.
class KineticDiscretization {
public:
    KineticDiscretization(const Potential& F, KineticGrid grid, bool adjoint);

    const KineticGrid& grid() const { return grid_; }
    // Normalized product measure weights w_ij.
    const std::vector<double>& weights() const { return weights_; }
    int size() const { return grid_.x.n * grid_.v.n; }
    bool adjoint() const { return adjoint_; }

    const std::vector<Eigen::Triplet<double>>& triplets() const { return triplets_; }

private:
    KineticGrid grid_;
    bool adjoint_;
    std::vector<double> weights_;
    std::vector<Eigen::Triplet<double>> triplets_;
};

// Implicit Euler evolution of the kinetic density h (w.r.t. mu),
// recording the same functional set as the 1D oracle.
SemigroupTrace kinetic_evolve(const KineticDiscretization& kd, std::vector<double> h0,
                              const std::vector<double>& t_grid, double dt,
                              const std::vector<double>& weight = {});

}  // namespace ergo
