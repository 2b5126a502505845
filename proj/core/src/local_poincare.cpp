#include "ergo/local_poincare.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "ergo/errors.hpp"
#include "ergo/spectral.hpp"

namespace ergo {

LocalPoincareReport local_poincare(const GibbsMeasure& m, double u_radius) {
    if (u_radius <= 0) throw ConfigError("U must have positive radius");
    if (u_radius > m.box_radius() + 1e-12)
        throw ConfigError("U larger than the quadrature box");
    u_radius = std::min(u_radius, m.box_radius());

    DiscretizedGenerator disc(m.potential(), m.box_radius(), m.grid_nodes());
    int n = disc.size();
    const auto& w = disc.weights();

    LocalPoincareReport rep;
    rep.u_radius = u_radius;

    // (a) perturbation bound: Neumann constant of |U| with the oscillation
    // of 2F on U as the log-bounded perturbation factor.
    double osc_lo = std::numeric_limits<double>::infinity();
    double osc_hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double x = disc.node(i);
        if (std::fabs(x) <= u_radius) {
            double v = 2.0 * m.potential().value1(x);
            osc_lo = std::min(osc_lo, v);
            osc_hi = std::max(osc_hi, v);
        }
    }
    double len = 2.0 * u_radius;
    rep.bound = (8.0 * len * len / (2.0 * M_PI * M_PI)) * std::exp(2.0 * (osc_hi - osc_lo));

    // (b) numerical optimum of f^T N f / f^T K f over mean-zero f, where
    // N carries the U-restricted variance and K the Dirichlet form. The
    // rank-one penalty tau w w^T removes the constant kernel of K; any
    // eigenvector with a nonzero eigenvalue is automatically w-orthogonal.
    Eigen::VectorXd wv(n), in_u(n);
    double mu_u = 0;
    for (int i = 0; i < n; ++i) {
        wv(i) = w[static_cast<std::size_t>(i)];
        bool inside = std::fabs(disc.node(i)) <= u_radius + 1e-12;
        in_u(i) = inside ? 1.0 : 0.0;
        if (inside) mu_u += wv(i);
    }
    rep.mu_u = mu_u;

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        B(i, i) = -disc.diag(i) * wv(i);
        if (i + 1 < n) {
            double c = -disc.offdiag(i) * wv(i);
            B(i, i + 1) = c;
            B(i + 1, i) = c;
        }
    }
    double tau = B.diagonal().maxCoeff();
    B += tau * wv * wv.transpose();
    Eigen::LDLT<Eigen::MatrixXd> solver(B);
    if (solver.info() != Eigen::Success)
        throw NumericalError("local Poincare energy matrix factorization failed");

    auto apply_N = [&](const Eigen::VectorXd& f) {
        Eigen::VectorXd mf = (wv.array() * in_u.array() * f.array()).matrix();
        double mean_u = mf.sum() / mu_u;
        return (mf - mean_u * (wv.array() * in_u.array()).matrix()).eval();
    };

    // Power iteration on B^{-1} N.
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = std::sin(1.0 + 0.37 * i) + disc.node(i);
    double theta = 0, theta_prev = -1;
    int it = 0;
    for (; it < 20000; ++it) {
        Eigen::VectorXd y = apply_N(f);
        Eigen::VectorXd z = solver.solve(y);
        double nz = z.norm();
        if (nz == 0) throw NumericalError("local Poincare power iteration collapsed");
        z /= nz;
        Eigen::VectorXd nzv = apply_N(z);
        double num = z.dot(nzv);
        Eigen::VectorXd bz = B * z;
        double den = z.dot(bz);
        theta = num / den;
        f = z;
        if (it > 10 && std::fabs(theta - theta_prev) < 1e-11 * std::max(1.0, theta)) break;
        theta_prev = theta;
    }
    rep.iterations = it;
    rep.converged = it < 20000;
    rep.numerical = theta;
    return rep;
}

}  // namespace ergo
