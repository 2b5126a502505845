#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergo/generator.hpp"
#include "ergo/gibbs.hpp"
#include "ergo/trace.hpp"

namespace ergo::mc {

// Particle ensemble for the Euler-Maruyama schemes. Noise comes from
// counter-based substreams keyed by (seed, particle, step), so results do
// not depend on the worker count or scheduling.
struct Ensemble {
    int d = 1;
    bool kinetic = false;
    std::vector<double> pos;  // n * d, particle-major
    std::vector<double> vel;  // n * d when kinetic
    double time = 0;
    std::uint64_t seed = 0;
    double dt = 1e-3;
    std::uint64_t step_index = 0;

    std::size_t size() const { return pos.size() / static_cast<std::size_t>(d); }
};

Ensemble make_ensemble(const GeneratorSpec& L, std::size_t n, double dt, std::uint64_t seed);

// One Euler-Maruyama step. Throws NumericalError naming the first
// non-finite particle.
void step(Ensemble& e, const GeneratorSpec& L, int workers = 1);

// Order-insensitive ensemble reductions (fixed-chunk pairwise sums).
double mean_position_moment(const Ensemble& e, int axis, int power, int workers = 1);
double mean_velocity_moment(const Ensemble& e, int axis, int power, int workers = 1);
double mean_potential(const Ensemble& e, const Potential& F, int workers = 1);

// Stationary autocovariance of f along a single path started from the
// exact 1D sampler: Cov(f(X_0), f(X_t)) with batch-means standard errors.
// Reversible (overdamped) generators only.
McTrace autocovariance_trace(const GeneratorSpec& L, const Expr& f, const GibbsMeasure& init,
                             double horizon, double dt, const std::vector<double>& lags,
                             std::uint64_t seed, int batches = 10);

// Initial laws for the density runs.
struct InitialLaw {
    enum class Kind { Stationary, ShiftedGaussian, HeavyTailRatio } kind = Kind::Stationary;
    double center = 0, sdev = 1;    // shifted Gaussian parameters (position)
    double vcenter = 0, vsdev = 1;  // kinetic velocity component
    double heavy_a = 1;             // Kind::HeavyTailRatio exponent parameter

    static InitialLaw stationary() { return {}; }
    static InitialLaw shifted_gaussian(double center, double sdev, double vcenter = 0,
                                       double vsdev = 1);
    // h(x,v) = e^{|x|^2+|v|^2} / (1+|x|^{d+1}+|v|^{d+1})^{a+1} as a density
    // ratio against mu; sampled by rejection against the shifted-Gaussian
    // proposal. Qualitative runs only.
    static InitialLaw heavy_tail_ratio(double a);
};

struct DensityTraceOptions {
    std::size_t particles = 100000;
    double dt = 1e-3;
    int bins = 64;  // per axis
    int batches = 10;
    int workers = 1;
    std::vector<double> weight_nodes;  // optional W for the Psi functional (per bin center)
};

struct DensityTraces {
    McTrace entropy;
    McTrace tv;
    McTrace psi;
    bool empty_bin_warning = false;  // empty bins covered > 20% of mu-mass
};

// Histogram density estimation against the exact bin masses of mu;
// entropy, TV and the Psi functional with batch-means standard errors.
DensityTraces ensemble_density_trace(const GeneratorSpec& L, const InitialLaw& h0,
                                     const GibbsMeasure& m, const std::vector<double>& t_grid,
                                     std::uint64_t seed, const DensityTraceOptions& opts);

// Kinetic variant on the (x, v) product measure (2D histogram).
DensityTraces kinetic_density_trace(const GeneratorSpec& L, const InitialLaw& h0,
                                    const GibbsMeasure& mx, double vbox,
                                    const std::vector<double>& t_grid, std::uint64_t seed,
                                    const DensityTraceOptions& opts);

struct RateFit {
    enum class Model { Geometric, Subgeometric } model = Model::Geometric;
    double rho = 0;
    double delta = 1;  // stretch exponent for the subgeometric model
    double r2 = 0;
    double window_lo = 0, window_hi = 0;
    bool reliable = false;  // rho reported only when r2 > 0.95
};

// Weighted least squares of log y against t (geometric) or t^delta
// (subgeometric); free delta profiles over [0.05, 1] in steps of 0.01.
RateFit fit_rate(const McTrace& trace, RateFit::Model model,
                 std::optional<double> fixed_delta = std::nullopt);

}  // namespace ergo::mc
