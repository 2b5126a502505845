#pragma once

#include <cstdint>
#include <vector>

#include "ergo/grid.hpp"
#include "ergo/potential.hpp"

namespace ergo {

// Normalized Gibbs measure mu = Z_F^-1 e^{-2F} dx truncated to the box
// [-R, R]^d (d <= 2 for quadrature; the artifact's measure work is 1D).
// Z_F estimates the full-space integral: box quadrature plus an analytic
// tail envelope for the builtin families. Custom potentials carry an
// unknown tail, reported as 0 with a warning flag.
class GibbsMeasure {
public:
    // box_is_domain treats the box as the whole state space: no tail, no
    // integrability heuristic (Lebesgue-on-a-box style measures).
    GibbsMeasure(Potential pot, double box_radius, int grid_nodes, bool box_is_domain = false);

    const Potential& potential() const { return pot_; }
    double box_radius() const { return radius_; }
    int grid_nodes() const { return n_; }
    const Grid1D& grid() const { return grid_; }

    double normalization() const { return z_; }
    // Embedded-rule (Simpson vs trapezoid) quadrature error estimate for Z.
    double quadrature_error() const { return quad_error_; }
    // Estimated fraction of mass outside the box.
    double tail_fraction() const { return tail_fraction_; }
    bool tail_known() const { return tail_known_; }

    // Node quadrature weights of the normalized measure; they sum to
    // (1 - tail_fraction) within quadrature tolerance.
    const std::vector<double>& weights() const { return weights_; }
    double node(int i) const { return grid_.node(i); }

    // Normalized density e^{-2F(x)} / Z_F.
    double density(double x) const;

    // Box-truncated moment  int x^k dmu  by quadrature.
    double moment(int k) const;
    // mu([a, b] cap box).
    double mass(double a, double b) const;

    // CDF of the box-normalized measure by cumulative trapezoid.
    double cdf(double x) const;
    // Inverse CDF by linear interpolation on the cumulative table.
    double quantile(double u) const;

    // Deterministic inverse-CDF sampling (d = 1 only).
    std::vector<double> sample(std::size_t count, std::uint64_t seed) const;

private:
    Potential pot_;
    double radius_;
    int n_;
    Grid1D grid_;
    double z_ = 0.0;
    double quad_error_ = 0.0;
    double tail_fraction_ = 0.0;
    bool tail_known_ = false;
    std::vector<double> weights_;     // normalized quadrature weights
    std::vector<double> density_;     // normalized density at nodes
    std::vector<double> cumulative_;  // trapezoid CDF at nodes, [0, ~1]
};

// Builds the measure, running the integrability heuristic: the box
// integral must be stable under halving the box, and the integrand must
// decay toward the edges unless a tail envelope says otherwise.
GibbsMeasure normalize(const Potential& pot, double box_radius, int grid_nodes);

// Unnormalized tail  int_{|x|>R} e^{-2F}  for builtin families; nullopt
// for custom potentials.
std::optional<double> tail_envelope(const Potential& pot, double box_radius);

}  // namespace ergo
