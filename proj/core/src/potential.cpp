#include "ergo/potential.hpp"

#include <cfloat>
#include <cmath>
#include <cstdio>

#include "ergo/errors.hpp"

namespace ergo {

namespace {

double sqnorm(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sum_of_squares(int d) {
    std::string s;
    for (int i = 0; i < d; ++i) {
        if (i) s += "+";
        s += "x" + std::to_string(i + 1) + "^2";
    }
    return s;
}

[[noreturn]] void singular() {
    throw NumericalError("potential derivative evaluated at excluded singular point (origin)");
}

constexpr double kFdStep = 6.0554544523933395e-06;   // eps^(1/3), first derivatives
constexpr double kFdStep2 = 1.2207031250000000e-04;  // eps^(1/4), second derivatives

}  // namespace

Potential Potential::power(double p, double delta, int d) {
    if (p <= 0) throw ConfigError("Power potential requires p > 0");
    if (delta < 0) throw ConfigError("Power potential requires delta >= 0");
    return Potential(PowerForm{p, delta}, d);
}

Potential Potential::heavy_tail(double p, int d) {
    if (p <= 0) throw ConfigError("HeavyTail potential requires p > 0");
    return Potential(HeavyTailForm{p}, d);
}

Potential Potential::quadratic(double kappa, int d) {
    if (kappa <= 0) throw ConfigError("Quadratic potential requires kappa > 0");
    return Potential(QuadraticForm{kappa}, d);
}

Potential Potential::custom(Expr expr) {
    int d = expr.dimension();
    return Potential(CustomForm{std::move(expr)}, d);
}

Potential Potential::parse(const std::string& text, int d) {
    return custom(Expr::parse(text, d));
}

double Potential::value(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw ConfigError("point dimension mismatch");
    if (auto* f = std::get_if<PowerForm>(&form_)) {
        return std::pow(f->delta * f->delta + sqnorm(x), f->p / 2.0);
    }
    if (auto* f = std::get_if<HeavyTailForm>(&form_)) {
        return 0.5 * (dim_ + f->p) * std::log1p(std::sqrt(sqnorm(x)));
    }
    if (auto* f = std::get_if<QuadraticForm>(&form_)) {
        return 0.5 * f->kappa * sqnorm(x);
    }
    return std::get<CustomForm>(form_).expr.eval(x);
}

Vector Potential::grad(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw ConfigError("point dimension mismatch");
    Vector g(dim_);
    if (auto* f = std::get_if<PowerForm>(&form_)) {
        double s = f->delta * f->delta + sqnorm(x);
        if (s <= 0) singular();
        double c = f->p * std::pow(s, f->p / 2.0 - 1.0);
        for (int i = 0; i < dim_; ++i) g(i) = c * x[i];
        return g;
    }
    if (auto* f = std::get_if<HeavyTailForm>(&form_)) {
        double r = std::sqrt(sqnorm(x));
        double k = 0.5 * (dim_ + f->p);
        if (r == 0) {
            g.setZero();  // symmetric subgradient at the kink
            return g;
        }
        double c = k / (r * (1.0 + r));
        for (int i = 0; i < dim_; ++i) g(i) = c * x[i];
        return g;
    }
    if (auto* f = std::get_if<QuadraticForm>(&form_)) {
        for (int i = 0; i < dim_; ++i) g(i) = f->kappa * x[i];
        return g;
    }
    // Central differences, second order.
    const auto& e = std::get<CustomForm>(form_).expr;
    std::vector<double> pt(x.begin(), x.end());
    for (int i = 0; i < dim_; ++i) {
        double h = kFdStep * std::max(1.0, std::fabs(x[i]));
        double xi = pt[i];
        pt[i] = xi + h;
        double fp = e.eval(pt);
        pt[i] = xi - h;
        double fm = e.eval(pt);
        pt[i] = xi;
        g(i) = (fp - fm) / (2 * h);
    }
    return g;
}

double Potential::laplacian(std::span<const double> x) const {
    Matrix h = hessian(x);
    return h.trace();
}

Matrix Potential::hessian(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw ConfigError("point dimension mismatch");
    Matrix h(dim_, dim_);
    if (auto* f = std::get_if<PowerForm>(&form_)) {
        double s = f->delta * f->delta + sqnorm(x);
        if (s <= 0) singular();
        double a = f->p * std::pow(s, f->p / 2.0 - 1.0);
        double b = f->p * (f->p - 2.0) * std::pow(s, f->p / 2.0 - 2.0);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) h(i, j) = b * x[i] * x[j] + (i == j ? a : 0.0);
        return h;
    }
    if (auto* f = std::get_if<HeavyTailForm>(&form_)) {
        double r = std::sqrt(sqnorm(x));
        if (r == 0) singular();
        double k = 0.5 * (dim_ + f->p);
        double a = k / (r * (1.0 + r));
        // d/dr [1/(r(1+r))] = -(1+2r)/(r(1+r))^2 ; radial part divides by r.
        double b = -k * (1.0 + 2.0 * r) / (r * r * r * (1.0 + r) * (1.0 + r));
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) h(i, j) = b * x[i] * x[j] + (i == j ? a : 0.0);
        return h;
    }
    if (auto* f = std::get_if<QuadraticForm>(&form_)) {
        h.setZero();
        for (int i = 0; i < dim_; ++i) h(i, i) = f->kappa;
        return h;
    }
    const auto& e = std::get<CustomForm>(form_).expr;
    std::vector<double> pt(x.begin(), x.end());
    double f0 = e.eval(pt);
    std::vector<double> step(dim_);
    for (int i = 0; i < dim_; ++i) step[i] = kFdStep2 * std::max(1.0, std::fabs(x[i]));
    for (int i = 0; i < dim_; ++i) {
        double xi = pt[i];
        pt[i] = xi + step[i];
        double fp = e.eval(pt);
        pt[i] = xi - step[i];
        double fm = e.eval(pt);
        pt[i] = xi;
        h(i, i) = (fp - 2 * f0 + fm) / (step[i] * step[i]);
    }
    for (int i = 0; i < dim_; ++i) {
        for (int j = i + 1; j < dim_; ++j) {
            double xi = pt[i], xj = pt[j];
            pt[i] = xi + step[i]; pt[j] = xj + step[j];
            double fpp = e.eval(pt);
            pt[j] = xj - step[j];
            double fpm = e.eval(pt);
            pt[i] = xi - step[i]; pt[j] = xj + step[j];
            double fmp = e.eval(pt);
            pt[j] = xj - step[j];
            double fmm = e.eval(pt);
            pt[i] = xi; pt[j] = xj;
            double v = (fpp - fpm - fmp + fmm) / (4 * step[i] * step[j]);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

std::string Potential::print() const {
    if (auto* f = std::get_if<PowerForm>(&form_)) {
        return "((" + num(f->delta * f->delta) + "+" + sum_of_squares(dim_) + ")^0.5)^" +
               num(f->p);
    }
    if (auto* f = std::get_if<HeavyTailForm>(&form_)) {
        return num(0.5 * (dim_ + f->p)) + "*log(1+sqrt(" + sum_of_squares(dim_) + "))";
    }
    if (auto* f = std::get_if<QuadraticForm>(&form_)) {
        return num(f->kappa) + "*(" + sum_of_squares(dim_) + ")/2";
    }
    return std::get<CustomForm>(form_).expr.print();
}

}  // namespace ergo
