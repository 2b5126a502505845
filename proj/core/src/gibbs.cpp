#include "ergo/gibbs.hpp"

#include <algorithm>
#include <cmath>

#include "ergo/errors.hpp"
#include "ergo/rng.hpp"

namespace ergo {

std::vector<double> quadrature_weights(const Grid1D& g) {
    std::vector<double> w(static_cast<std::size_t>(g.n));
    double h = g.h();
    if (g.n >= 3 && (g.n - 1) % 2 == 0) {
        for (int i = 0; i < g.n; ++i) {
            double c;
            if (i == 0 || i == g.n - 1) c = 1.0;
            else if (i % 2 == 1) c = 4.0;
            else c = 2.0;
            w[static_cast<std::size_t>(i)] = c * h / 3.0;
        }
    } else {
        for (int i = 0; i < g.n; ++i)
            w[static_cast<std::size_t>(i)] = (i == 0 || i == g.n - 1) ? h / 2.0 : h;
    }
    return w;
}

double integrate(const Grid1D& g, const std::function<double(double)>& f) {
    auto w = quadrature_weights(g);
    double s = 0;
    for (int i = 0; i < g.n; ++i) s += w[static_cast<std::size_t>(i)] * f(g.node(i));
    return s;
}

namespace {

// Upper bound on 2 * int_R^inf e^{-2 x^p} dx for 0 < p < 1 by doubling
// segments with the chord slope from below on each segment.
double subexp_tail(double R, double p, double delta) {
    (void)delta;  // delta only tightens the bound
    double total = 0.0;
    double a = R;
    for (int k = 0; k < 200; ++k) {
        double b = 2 * a;
        double slope = 2.0 * p * std::pow(b, p - 1.0);  // min of d/dx 2x^p on [a,b]
        double f0 = 2.0 * std::pow(a, p);
        // int_a^b e^{-(f0 + slope (x-a))} dx <= e^{-f0} / slope
        double seg = std::exp(-f0) / slope * (1.0 - std::exp(-slope * (b - a)));
        total += seg;
        if (seg < 1e-18 * (total + 1e-300)) break;
        a = b;
    }
    return 2.0 * total;
}

}  // namespace

std::optional<double> tail_envelope(const Potential& pot, double R) {
    if (pot.dimension() != 1) return std::nullopt;
    if (auto* f = std::get_if<QuadraticForm>(&pot.form())) {
        double k = f->kappa;
        return std::sqrt(M_PI / k) * std::erfc(std::sqrt(k) * R);
    }
    if (auto* f = std::get_if<HeavyTailForm>(&pot.form())) {
        double q = f->p;  // density (1+|x|)^-(1+p) in 1D
        return 2.0 * std::pow(1.0 + R, -q) / q;
    }
    if (auto* f = std::get_if<PowerForm>(&pot.form())) {
        if (f->p >= 1.0) {
            // (delta^2+x^2)^(p/2) >= x^p >= R^(p-1) x for x >= R
            double slope = 2.0 * std::pow(R, f->p - 1.0);
            return 2.0 * std::exp(-slope * R) / slope;
        }
        return subexp_tail(R, f->p, f->delta);
    }
    return std::nullopt;
}

GibbsMeasure::GibbsMeasure(Potential pot, double box_radius, int grid_nodes, bool box_is_domain)
    : pot_(std::move(pot)), radius_(box_radius), n_(grid_nodes) {
    if (pot_.dimension() != 1)
        throw ConfigError("GibbsMeasure quadrature supports d = 1 (use the kinetic "
                          "module for the 2D position-velocity measure)");
    if (n_ < 3) throw ConfigError("grid must have at least 3 nodes");
    if (radius_ <= 0) throw ConfigError("box radius must be positive");
    grid_ = Grid1D{-radius_, radius_, n_};

    auto w = quadrature_weights(grid_);
    std::vector<double> integrand(static_cast<std::size_t>(n_));
    double box_integral = 0.0;
    double trapezoid_integral = 0.0;
    double half_integral = 0.0;
    double max_val = 0.0;
    double hstep = grid_.h();
    for (int i = 0; i < n_; ++i) {
        double x = grid_.node(i);
        double F = pot_.value1(x);
        if (!std::isfinite(F))
            throw NumericalError("potential not finite on the evaluation grid");
        double v = std::exp(-2.0 * F);
        integrand[static_cast<std::size_t>(i)] = v;
        box_integral += w[static_cast<std::size_t>(i)] * v;
        trapezoid_integral += ((i == 0 || i == n_ - 1) ? 0.5 : 1.0) * hstep * v;
        if (std::fabs(x) <= radius_ / 2) half_integral += w[static_cast<std::size_t>(i)] * v;
        max_val = std::max(max_val, v);
    }
    quad_error_ = std::fabs(box_integral - trapezoid_integral);
    if (!(box_integral > 0) || !std::isfinite(box_integral))
        throw NumericalError("e^{-2F} not integrable on the box");

    auto tail = box_is_domain ? std::optional<double>(0.0) : tail_envelope(pot_, radius_);
    tail_known_ = tail.has_value();
    double tail_mass = tail.value_or(0.0);

    // Divergence heuristic: strong growth when the box is enlarged means
    // the integrand is blowing up at the edges.
    double edge = std::max(integrand.front(), integrand.back());
    if (!tail_known_ && !box_is_domain) {
        if (half_integral > 0 && box_integral > 1.5 * half_integral && edge > 1e-6 * max_val)
            throw NumericalError(
                "integral not converging under box refinement; e^{-2F} looks non-integrable");
    }

    z_ = box_integral + tail_mass;
    tail_fraction_ = tail_mass / z_;

    weights_.resize(static_cast<std::size_t>(n_));
    density_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        density_[static_cast<std::size_t>(i)] = integrand[static_cast<std::size_t>(i)] / z_;
        weights_[static_cast<std::size_t>(i)] =
            w[static_cast<std::size_t>(i)] * density_[static_cast<std::size_t>(i)];
    }

    // Cumulative trapezoid of the box-normalized density for sampling.
    cumulative_.assign(static_cast<std::size_t>(n_), 0.0);
    double h = grid_.h();
    double box_mass = box_integral / z_;
    for (int i = 1; i < n_; ++i) {
        double inc = 0.5 * h *
                     (density_[static_cast<std::size_t>(i)] +
                      density_[static_cast<std::size_t>(i - 1)]);
        cumulative_[static_cast<std::size_t>(i)] =
            cumulative_[static_cast<std::size_t>(i - 1)] + inc / box_mass;
    }
    // Clamp the accumulated roundoff so quantile(1) maps to the box edge.
    for (auto& c : cumulative_) c = std::min(c, 1.0);
    cumulative_.back() = 1.0;
}

double GibbsMeasure::density(double x) const { return std::exp(-2.0 * pot_.value1(x)) / z_; }

double GibbsMeasure::moment(int k) const {
    double s = 0;
    for (int i = 0; i < n_; ++i)
        s += std::pow(grid_.node(i), k) * weights_[static_cast<std::size_t>(i)];
    return s;
}

double GibbsMeasure::mass(double a, double b) const {
    double s = 0;
    for (int i = 0; i < n_; ++i) {
        double x = grid_.node(i);
        if (x >= a && x <= b) s += weights_[static_cast<std::size_t>(i)];
    }
    return s;
}

double GibbsMeasure::cdf(double x) const {
    if (x <= grid_.lo) return 0.0;
    if (x >= grid_.hi) return 1.0;
    double pos = (x - grid_.lo) / grid_.h();
    int i = static_cast<int>(pos);
    i = std::min(i, n_ - 2);
    double frac = pos - i;
    double c0 = cumulative_[static_cast<std::size_t>(i)];
    double c1 = cumulative_[static_cast<std::size_t>(i + 1)];
    return c0 + frac * (c1 - c0);
}

double GibbsMeasure::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.begin()) return grid_.lo;
    if (it == cumulative_.end()) return grid_.hi;
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    double c0 = cumulative_[i - 1], c1 = cumulative_[i];
    double x0 = grid_.node(static_cast<int>(i - 1));
    if (c1 <= c0) return x0;
    return x0 + grid_.h() * (u - c0) / (c1 - c0);
}

std::vector<double> GibbsMeasure::sample(std::size_t count, std::uint64_t seed) const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        double u = CounterRng::uniform(seed, /*stream=*/0x1d5a3e77ULL, i);
        out[i] = quantile(u);
    }
    return out;
}

GibbsMeasure normalize(const Potential& pot, double box_radius, int grid_nodes) {
    if (pot.dimension() > 2)
        throw ConfigError("normalize: quadrature restricted to d <= 2");
    return GibbsMeasure(pot, box_radius, grid_nodes);
}

}  // namespace ergo
