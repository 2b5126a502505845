#include "ergo/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "ergo/errors.hpp"

namespace ergo {

DiscretizedGenerator::DiscretizedGenerator(const Potential& pot, double box_radius, int n)
    : n_(n), grid_{-box_radius, box_radius, n} {
    if (pot.dimension() != 1)
        throw ConfigError("DiscretizedGenerator supports 1D overdamped generators");
    if (n < 5) throw ConfigError("grid too coarse");
    double h = grid_.h();

    std::vector<double> F(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) F[static_cast<std::size_t>(i)] = pot.value1(grid_.node(i));
    double fmin = *std::min_element(F.begin(), F.end());

    // Lumped weights, shifted by min F for overflow safety.
    weights_.assign(static_cast<std::size_t>(n), 0.0);
    double total = 0;
    for (int i = 0; i < n; ++i) {
        double c = (i == 0 || i == n_ - 1) ? 0.5 : 1.0;
        double raw = c * h * std::exp(-2.0 * (F[static_cast<std::size_t>(i)] - fmin));
        weights_[static_cast<std::size_t>(i)] = std::max(raw, 1e-290);  // underflow floor
        total += weights_[static_cast<std::size_t>(i)];
    }
    for (auto& w : weights_) w /= total;

    // Edge conductances of E(f) = 1/2 int f'^2 dmu with geometric-mean
    // edge density.
    cond_.assign(static_cast<std::size_t>(n - 1), 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        double edge = std::exp(-(F[static_cast<std::size_t>(i)] +
                                 F[static_cast<std::size_t>(i + 1)]) + 2.0 * fmin);
        cond_[static_cast<std::size_t>(i)] = std::max(0.5 * edge / (h * total), 1e-290);
    }
}

double DiscretizedGenerator::offdiag(int i) const {
    return cond_[static_cast<std::size_t>(i)] / weights_[static_cast<std::size_t>(i)];
}

double DiscretizedGenerator::subdiag(int i) const {
    return cond_[static_cast<std::size_t>(i - 1)] / weights_[static_cast<std::size_t>(i)];
}

double DiscretizedGenerator::diag(int i) const {
    double s = 0;
    if (i > 0) s += cond_[static_cast<std::size_t>(i - 1)];
    if (i + 1 < n_) s += cond_[static_cast<std::size_t>(i)];
    return -s / weights_[static_cast<std::size_t>(i)];
}

void DiscretizedGenerator::apply(const std::vector<double>& f, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0;
        if (i > 0)
            s += cond_[static_cast<std::size_t>(i - 1)] *
                 (f[static_cast<std::size_t>(i - 1)] - f[static_cast<std::size_t>(i)]);
        if (i + 1 < n_)
            s += cond_[static_cast<std::size_t>(i)] *
                 (f[static_cast<std::size_t>(i + 1)] - f[static_cast<std::size_t>(i)]);
        out[static_cast<std::size_t>(i)] = s / weights_[static_cast<std::size_t>(i)];
    }
}

void DiscretizedGenerator::symmetrized(std::vector<double>& diag_out,
                                       std::vector<double>& off_out) const {
    diag_out.assign(static_cast<std::size_t>(n_), 0.0);
    off_out.assign(static_cast<std::size_t>(n_ - 1), 0.0);
    for (int i = 0; i < n_; ++i) diag_out[static_cast<std::size_t>(i)] = -diag(i);
    for (int i = 0; i + 1 < n_; ++i)
        off_out[static_cast<std::size_t>(i)] =
            -cond_[static_cast<std::size_t>(i)] /
            std::sqrt(weights_[static_cast<std::size_t>(i)] *
                      weights_[static_cast<std::size_t>(i + 1)]);
}

double DiscretizedGenerator::max_abs_row_sum() const {
    double m = 0;
    for (int i = 0; i < n_; ++i) {
        double s = diag(i);
        if (i > 0) s += subdiag(i);
        if (i + 1 < n_) s += offdiag(i);
        m = std::max(m, std::fabs(s));
    }
    return m;
}

double DiscretizedGenerator::symmetry_defect() const {
    // WA is -K by construction; report the max asymmetry of the assembled
    // entries as a guard against assembly bugs.
    double m = 0;
    for (int i = 0; i + 1 < n_; ++i) {
        double upper = weights_[static_cast<std::size_t>(i)] * offdiag(i);
        double lower = weights_[static_cast<std::size_t>(i + 1)] * subdiag(i + 1);
        m = std::max(m, std::fabs(upper - lower));
    }
    return m;
}

namespace {

// Number of eigenvalues of the symmetric tridiagonal (diag, off) strictly
// below sigma, by the Sturm / LDL^T sign count.
int count_below(const std::vector<double>& diag, const std::vector<double>& off, double sigma) {
    int count = 0;
    double q = diag[0] - sigma;
    if (q < 0) ++count;
    const double tiny = 1e-300;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        double denom = (std::fabs(q) < tiny) ? ((q < 0) ? -tiny : tiny) : q;
        q = (diag[i] - sigma) - off[i - 1] * off[i - 1] / denom;
        if (q < 0) ++count;
    }
    return count;
}

}  // namespace

double lambda1_of(const DiscretizedGenerator& d) {
    std::vector<double> dg, off;
    d.symmetrized(dg, off);
    double hi = 0;
    for (std::size_t i = 0; i < dg.size(); ++i) {
        double r = dg[i];
        if (i > 0) r += std::fabs(off[i - 1]);
        if (i < off.size()) r += std::fabs(off[i]);
        hi = std::max(hi, r);
    }
    // T is PSD with a known zero eigenvalue; bisect for the boundary where
    // two eigenvalues lie below sigma.
    double lo = 0.0;
    if (count_below(dg, off, hi) < 2)
        throw NumericalError("eigensolve failure: spectrum collapsed");
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (count_below(dg, off, mid) >= 2) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

SpectralReport spectral_gap(const DiscretizedGenerator& d) {
    SpectralReport rep;
    rep.n = d.size();
    rep.box_radius = d.grid().hi;
    rep.lambda1 = lambda1_of(d);
    if (rep.lambda1 < 1e-12) {
        rep.no_gap = true;
        rep.c_p = std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.c_p = 1.0 / rep.lambda1;
    return rep;
}

SpectralReport spectral_gap(const Potential& pot, double box_radius, int n) {
    DiscretizedGenerator coarse(pot, box_radius, n);
    SpectralReport rep = spectral_gap(coarse);
    if (rep.no_gap) return rep;
    DiscretizedGenerator fine(pot, box_radius, 2 * n - 1);
    rep.lambda1_refined = lambda1_of(fine);
    rep.richardson_error = std::fabs(rep.lambda1_refined - rep.lambda1) / 3.0;
    return rep;
}

}  // namespace ergo
