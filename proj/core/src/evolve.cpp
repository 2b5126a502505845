#include "ergo/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "ergo/errors.hpp"
#include "ergo/rates.hpp"

namespace ergo {

namespace {

// Thomas solve for (I - c A) f = rhs with A the tridiagonal generator.
struct TriSolver {
    std::vector<double> a, b, c;  // sub, diag, super of (I - cA)
    std::vector<double> cp, dp;

    TriSolver(const DiscretizedGenerator& d, double coef) {
        int n = d.size();
        a.assign(static_cast<std::size_t>(n), 0.0);
        b.assign(static_cast<std::size_t>(n), 0.0);
        c.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            b[static_cast<std::size_t>(i)] = 1.0 - coef * d.diag(i);
            if (i > 0) a[static_cast<std::size_t>(i)] = -coef * d.subdiag(i);
            if (i + 1 < n) c[static_cast<std::size_t>(i)] = -coef * d.offdiag(i);
        }
        cp.resize(static_cast<std::size_t>(n));
        dp.resize(static_cast<std::size_t>(n));
    }

    void solve(std::vector<double>& x) {
        std::size_t n = b.size();
        cp[0] = c[0] / b[0];
        dp[0] = x[0] / b[0];
        for (std::size_t i = 1; i < n; ++i) {
            double m = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / m;
            dp[i] = (x[i] - a[i] * dp[i - 1]) / m;
        }
        x[n - 1] = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    }
};

struct Functionals {
    double variance, weighted_variance, entropy, tv, psi, mass;
};

Functionals measure_functionals(const std::vector<double>& g, const std::vector<double>& w,
                                const std::vector<double>& weight, bool density_mode) {
    double mean = 0, mass = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        mean += g[i] * w[i];
        mass += g[i] * w[i];
    }
    Functionals out{};
    out.mass = mass;
    double var = 0, wvar = 0, ent = 0, tv = 0, psi = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double dev = g[i] - mean;
        double ww = weight.empty() ? 1.0 : weight[i];
        var += dev * dev * w[i];
        wvar += dev * dev * ww * w[i];
        if (density_mode) {
            double h = g[i];
            if (h > 0) ent += h * std::log(h) * w[i];
            tv += 0.5 * std::fabs(h - 1.0) * w[i];
            psi += psi_sobolev(std::max(h, 0.0)) * ww * w[i];
        }
    }
    double nan = std::numeric_limits<double>::quiet_NaN();
    out.variance = var;
    out.weighted_variance = wvar;
    out.entropy = density_mode ? ent : nan;
    out.tv = density_mode ? tv : nan;
    out.psi = density_mode ? psi : nan;
    return out;
}

}  // namespace

SemigroupTrace semigroup_evolve(const DiscretizedGenerator& d, std::vector<double> h0,
                                const std::vector<double>& t_grid, const EvolveOptions& opts) {
    int n = d.size();
    if (static_cast<int>(h0.size()) != n) throw ConfigError("initial grid data size mismatch");
    if (t_grid.empty() || t_grid.front() < 0) throw ConfigError("bad output time grid");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (t_grid[k] <= t_grid[k - 1]) throw ConfigError("output times must increase");
    if (!opts.weight.empty() && static_cast<int>(opts.weight.size()) != n)
        throw ConfigError("weight grid size mismatch");

    const auto& w = d.weights();
    if (opts.density_mode) {
        double mass = 0;
        for (int i = 0; i < n; ++i) {
            if (h0[static_cast<std::size_t>(i)] < 0)
                throw ConfigError("density mode requires h0 >= 0");
            mass += h0[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        }
        if (std::fabs(mass - 1.0) > 1e-6)
            throw ConfigError("density mode requires int h0 dmu = 1 (got " +
                              std::to_string(mass) + ")");
    }

    double resolution = t_grid.size() > 1 ? t_grid[1] - t_grid[0] : t_grid[0];
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        resolution = std::min(resolution, t_grid[k] - t_grid[k - 1]);
    double dt_target = opts.dt > 0 ? std::min(opts.dt, resolution) : resolution;

    SemigroupTrace trace;
    auto record = [&](double t, const std::vector<double>& g) {
        auto f = measure_functionals(g, w, opts.weight, opts.density_mode);
        trace.times.push_back(t);
        trace.variance.push_back(f.variance);
        trace.weighted_variance.push_back(f.weighted_variance);
        trace.entropy.push_back(f.entropy);
        trace.tv.push_back(f.tv);
        trace.psi_functional.push_back(f.psi);
        trace.mass.push_back(f.mass);
    };

    std::vector<double> g = std::move(h0);
    double t = 0.0;
    std::vector<double> rhs(static_cast<std::size_t>(n));
    std::vector<double> ag(static_cast<std::size_t>(n));

    // Solver cache keyed by the current dt.
    double cached_dt = -1;
    std::optional<TriSolver> solver;

    for (double t_out : t_grid) {
        if (t_out > t) {
            double span = t_out - t;
            int steps = std::max(1, static_cast<int>(std::ceil(span / dt_target - 1e-12)));
            double dt = span / steps;
            if (std::fabs(dt - cached_dt) > 1e-15 * dt) {
                solver.emplace(d, dt / 2.0);
                cached_dt = dt;
            }
            for (int s = 0; s < steps; ++s) {
                d.apply(g, ag);
                for (int i = 0; i < n; ++i)
                    rhs[static_cast<std::size_t>(i)] =
                        g[static_cast<std::size_t>(i)] + 0.5 * dt * ag[static_cast<std::size_t>(i)];
                g = rhs;
                solver->solve(g);
            }
            t = t_out;
        }
        if (opts.density_mode) {
            for (int i = 0; i < n; ++i) {
                if (g[static_cast<std::size_t>(i)] < -1e-10)
                    throw NumericalError("negative density " +
                                         std::to_string(g[static_cast<std::size_t>(i)]) +
                                         " at node " + std::to_string(i) + ", t = " +
                                         std::to_string(t));
            }
        }
        record(t, g);
    }
    return trace;
}

KineticDiscretization::KineticDiscretization(const Potential& F, KineticGrid grid, bool adjoint)
    : grid_(grid), adjoint_(adjoint) {
    // The forward generator is assembled with difference stencils (row
    // sums vanish, so constants are exactly invariant). The adjoint used
    // for density evolution is its weighted transpose W^{-1} A^T W, which
    // conserves int h dmu exactly and keeps the M-matrix sign pattern; the
    // discrete stationary density then differs from 1 by the upwinding
    // truncation error, reported through the trace's mass/entropy floor.
    if (F.dimension() != 1)
        throw ConfigError("kinetic discretization supports 1D position only");
    int nx = grid_.x.n, nv = grid_.v.n;
    if (nx < 5 || nv < 5) throw ConfigError("kinetic grid too coarse");
    if (nx > 201 || nv > 201) throw ConfigError("kinetic grid capped at 201x201");
    double hx = grid_.x.h(), hv = grid_.v.h();

    // Product measure weights: x-marginal e^{-2F}, v-marginal e^{-v^2}.
    std::vector<double> wx(static_cast<std::size_t>(nx)), wv(static_cast<std::size_t>(nv));
    std::vector<double> Fx(static_cast<std::size_t>(nx));
    double fmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nx; ++i) {
        Fx[static_cast<std::size_t>(i)] = F.value1(grid_.x.node(i));
        fmin = std::min(fmin, Fx[static_cast<std::size_t>(i)]);
    }
    double sx = 0, sv = 0;
    for (int i = 0; i < nx; ++i) {
        double c = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        wx[static_cast<std::size_t>(i)] =
            c * hx * std::exp(-2.0 * (Fx[static_cast<std::size_t>(i)] - fmin));
        sx += wx[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < nv; ++j) {
        double c = (j == 0 || j == nv - 1) ? 0.5 : 1.0;
        double v = grid_.v.node(j);
        wv[static_cast<std::size_t>(j)] = c * hv * std::exp(-v * v);
        sv += wv[static_cast<std::size_t>(j)];
    }
    weights_.assign(static_cast<std::size_t>(nx * nv), 0.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nv; ++j)
            weights_[static_cast<std::size_t>(grid_.index(i, j))] =
                (wx[static_cast<std::size_t>(i)] / sx) * (wv[static_cast<std::size_t>(j)] / sv);

    auto add = [&](int row, int col, double val) {
        triplets_.emplace_back(row, col, val);
    };

    // v-line OU block: 1/2 d^2/dv^2 - v d/dv as a mu_v-symmetric stiffness;
    // the x-dependent density factor cancels, so coefficients are shared
    // across lines.
    std::vector<double> vnode(static_cast<std::size_t>(nv));
    for (int j = 0; j < nv; ++j) vnode[static_cast<std::size_t>(j)] = grid_.v.node(j);
    std::vector<double> vrho(static_cast<std::size_t>(nv));
    for (int j = 0; j < nv; ++j)
        vrho[static_cast<std::size_t>(j)] =
            std::exp(-vnode[static_cast<std::size_t>(j)] * vnode[static_cast<std::size_t>(j)]);

    for (int i = 0; i < nx; ++i) {
        double gradF = F.grad1(grid_.x.node(i));
        for (int j = 0; j < nv; ++j) {
            int row = grid_.index(i, j);
            double cj = (j == 0 || j == nv - 1) ? 0.5 : 1.0;
            double wj = cj * hv * vrho[static_cast<std::size_t>(j)];
            // diffusion-in-v conductances
            if (j + 1 < nv) {
                double edge = std::exp(-0.5 * (vnode[static_cast<std::size_t>(j)] * vnode[static_cast<std::size_t>(j)] +
                                               vnode[static_cast<std::size_t>(j + 1)] * vnode[static_cast<std::size_t>(j + 1)]));
                double k = 0.5 * edge / hv;
                add(row, grid_.index(i, j + 1), k / wj);
                add(row, row, -k / wj);
            }
            if (j > 0) {
                double edge = std::exp(-0.5 * (vnode[static_cast<std::size_t>(j)] * vnode[static_cast<std::size_t>(j)] +
                                               vnode[static_cast<std::size_t>(j - 1)] * vnode[static_cast<std::size_t>(j - 1)]));
                double k = 0.5 * edge / hv;
                add(row, grid_.index(i, j - 1), k / wj);
                add(row, row, -k / wj);
            }

            // transport: v d_x - F'(x) d_v with first-order upwinding,
            // which keeps the M-matrix structure.
            double cx = vnode[static_cast<std::size_t>(j)];
            if (cx > 0 && i + 1 < nx) {
                add(row, grid_.index(i + 1, j), cx / hx);
                add(row, row, -cx / hx);
            } else if (cx < 0 && i > 0) {
                add(row, grid_.index(i - 1, j), -cx / hx);
                add(row, row, cx / hx);
            }
            double cv = -gradF;
            if (cv > 0 && j + 1 < nv) {
                add(row, grid_.index(i, j + 1), cv / hv);
                add(row, row, -cv / hv);
            } else if (cv < 0 && j > 0) {
                add(row, grid_.index(i, j - 1), -cv / hv);
                add(row, row, cv / hv);
            }
        }
    }

    if (adjoint_) {
        std::vector<Eigen::Triplet<double>> flipped;
        flipped.reserve(triplets_.size());
        for (const auto& t : triplets_) {
            double scale = weights_[static_cast<std::size_t>(t.row())] /
                           weights_[static_cast<std::size_t>(t.col())];
            flipped.emplace_back(t.col(), t.row(), t.value() * scale);
        }
        triplets_.swap(flipped);
    }
}

SemigroupTrace kinetic_evolve(const KineticDiscretization& kd, std::vector<double> h0,
                              const std::vector<double>& t_grid, double dt,
                              const std::vector<double>& weight) {
    int n = kd.size();
    if (static_cast<int>(h0.size()) != n) throw ConfigError("initial grid data size mismatch");
    if (dt <= 0) throw ConfigError("kinetic evolution needs an explicit dt > 0");

    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(kd.triplets().begin(), kd.triplets().end());
    Eigen::SparseMatrix<double> M(n, n);
    {
        Eigen::SparseMatrix<double> I(n, n);
        I.setIdentity();
        M = I - dt * A;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success)
        throw NumericalError("kinetic implicit Euler factorization failed");

    const auto& w = kd.weights();
    SemigroupTrace trace;
    Eigen::Map<Eigen::VectorXd> h(h0.data(), n);

    auto record = [&](double t) {
        std::vector<double> g(h0.begin(), h0.end());
        auto f = measure_functionals(g, w, weight, /*density_mode=*/true);
        trace.times.push_back(t);
        trace.variance.push_back(f.variance);
        trace.weighted_variance.push_back(f.weighted_variance);
        trace.entropy.push_back(f.entropy);
        trace.tv.push_back(f.tv);
        trace.psi_functional.push_back(f.psi);
        trace.mass.push_back(f.mass);
    };

    double t = 0;
    for (double t_out : t_grid) {
        while (t < t_out - 1e-12) {
            Eigen::VectorXd next = lu.solve(h);
            h = next;
            t += dt;
        }
        for (int i = 0; i < n; ++i)
            if (h0[static_cast<std::size_t>(i)] < -1e-10)
                throw NumericalError("negative kinetic density at node " + std::to_string(i));
        record(t);
    }
    return trace;
}

}  // namespace ergo
