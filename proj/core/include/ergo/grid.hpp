#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ergo {

// Uniform 1D grid on [lo, hi] with n nodes.
struct Grid1D {
    double lo = -1.0;
    double hi = 1.0;
    int n = 2;

    double h() const { return (hi - lo) / (n - 1); }
    double node(int i) const { return lo + i * h(); }
    std::vector<double> nodes() const {
        std::vector<double> xs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = node(i);
        return xs;
    }
};

// Composite Simpson weights when the interval count is even, trapezoid
// otherwise. Weights include the step h.
std::vector<double> quadrature_weights(const Grid1D& g);

double integrate(const Grid1D& g, const std::function<double(double)>& f);

}  // namespace ergo
