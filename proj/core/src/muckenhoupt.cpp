#include "ergo/muckenhoupt.hpp"

#include <cmath>

#include "ergo/errors.hpp"

namespace ergo {

MuckenhouptReport muckenhoupt(const GibbsMeasure& m) {
    return muckenhoupt(m, m.quantile(0.5));
}

MuckenhouptReport muckenhoupt(const GibbsMeasure& m, double median) {
    if (m.potential().dimension() != 1)
        throw ConfigError("muckenhoupt criterion is 1D only");
    const auto& g = m.grid();
    int n = g.n;
    double h = g.h();

    std::vector<double> rho(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rho[static_cast<std::size_t>(i)] = m.density(g.node(i));

    // Split the analytic tail mass between the two sides (builtin families
    // are even in x).
    double side_tail = 0.5 * m.tail_fraction();

    // mu([x_i, inf)) and mu((-inf, x_i]) by cumulative trapezoid.
    std::vector<double> right_tail(static_cast<std::size_t>(n)), left_tail(static_cast<std::size_t>(n));
    right_tail[static_cast<std::size_t>(n - 1)] = side_tail;
    for (int i = n - 2; i >= 0; --i)
        right_tail[static_cast<std::size_t>(i)] =
            right_tail[static_cast<std::size_t>(i + 1)] +
            0.5 * h * (rho[static_cast<std::size_t>(i)] + rho[static_cast<std::size_t>(i + 1)]);
    left_tail[0] = side_tail;
    for (int i = 1; i < n; ++i)
        left_tail[static_cast<std::size_t>(i)] =
            left_tail[static_cast<std::size_t>(i - 1)] +
            0.5 * h * (rho[static_cast<std::size_t>(i)] + rho[static_cast<std::size_t>(i - 1)]);

    // B+ = sup_{x>m} mu([x,inf)) int_m^x 1/rho ; B- mirrored.
    double b_plus = 0, b_minus = 0;
    {
        double inv_int = 0;
        double prev_x = median, prev_inv = 1.0 / m.density(median);
        for (int i = 0; i < n; ++i) {
            double x = g.node(i);
            if (x <= median) continue;
            double inv = 1.0 / rho[static_cast<std::size_t>(i)];
            inv_int += 0.5 * (x - prev_x) * (prev_inv + inv);
            prev_x = x;
            prev_inv = inv;
            b_plus = std::max(b_plus, right_tail[static_cast<std::size_t>(i)] * inv_int);
        }
    }
    {
        double inv_int = 0;
        double prev_x = median, prev_inv = 1.0 / m.density(median);
        for (int i = n - 1; i >= 0; --i) {
            double x = g.node(i);
            if (x >= median) continue;
            double inv = 1.0 / rho[static_cast<std::size_t>(i)];
            inv_int += 0.5 * (prev_x - x) * (prev_inv + inv);
            prev_x = x;
            prev_inv = inv;
            b_minus = std::max(b_minus, left_tail[static_cast<std::size_t>(i)] * inv_int);
        }
    }

    MuckenhouptReport rep;
    // Generator-time units: C_P = 1/lambda1 of 1/2 Delta - F' d/dx is twice
    // the classical constant for int f'^2 dmu.
    rep.b_plus = 2.0 * b_plus;
    rep.b_minus = 2.0 * b_minus;
    rep.b = std::max(rep.b_plus, rep.b_minus);
    rep.lower = rep.b;
    rep.upper = 4.0 * rep.b;
    rep.median = median;
    return rep;
}

DivergenceReport muckenhoupt_divergence(const Potential& pot, double box_radius, int n) {
    DivergenceReport rep;
    double r = box_radius;
    for (int k = 0; k < 4; ++k) {
        GibbsMeasure m(pot, r, n);
        auto mk = muckenhoupt(m);
        rep.radii.push_back(r);
        rep.b_values.push_back(mk.b);
        r *= 2;
    }
    rep.diverges = true;
    for (std::size_t k = 1; k < rep.b_values.size(); ++k)
        if (rep.b_values[k] < 1.5 * rep.b_values[k - 1]) rep.diverges = false;
    return rep;
}

}  // namespace ergo
